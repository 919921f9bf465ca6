#pragma once

#include "egns/eg_space.hpp"
#include "egns/mesh.hpp"

#include <array>
#include <vector>

namespace egns {

/// Lowest-order Raviart-Thomas field. The basis function of edge e is
/// normalized so that phi_e . n_e == 1 on e, hence the coefficient of e is
/// the normal component along n_e.
struct RTField {
  std::vector<double> edge_coeff;
};

/// R v: the RT0 field whose normal flux on every edge equals v_b.
RTField reconstruct(const EGField& field);

/// Values of the three local RT0 basis functions of t at x:
/// phi_k(x) = sigma_k |e_k| / (2|T|) (x - p_k), p_k the vertex opposite e_k.
std::array<Vec2, 3> rt_basis(const Mesh2D& mesh, int t, const Vec2& x);

/// Integral of each local basis function over t.
std::array<Vec2, 3> rt_basis_integrals(const Mesh2D& mesh, int t);

/// Value of the field at a point of t. Throws OutOfElementError when x is
/// outside t by more than 1e-12 in barycentric coordinates.
Vec2 rt_evaluate(const Mesh2D& mesh, const RTField& field, int t, const Vec2& x);

/// Constant divergence of the field on t.
double rt_divergence(const Mesh2D& mesh, const RTField& field, int t);

}  // namespace egns
