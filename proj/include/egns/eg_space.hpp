#pragma once

#include "egns/common.hpp"
#include "egns/mesh.hpp"

#include <array>
#include <vector>

namespace egns {

/// Local element vectors/matrices use the fixed DOF order
/// (v0x at the 3 vertices, v0y at the 3 vertices, v_b on the 3 local edges).
inline constexpr int kLocalDofs = 9;
using LocalVector = Eigen::Matrix<double, kLocalDofs, 1>;
using LocalMatrix = Eigen::Matrix<double, kLocalDofs, kLocalDofs>;
/// Rows: (G00, G01, G10, G11) with G_ij = d v_i / d x_j.
using GradientOperator = Eigen::Matrix<double, 4, kLocalDofs>;

inline constexpr int local_x(int k) { return k; }
inline constexpr int local_y(int k) { return 3 + k; }
inline constexpr int local_edge(int k) { return 6 + k; }

/// Velocity in the enriched space: continuous P1 vector field plus one scalar
/// per edge (the normal-flux correction along the edge's assigned normal).
struct EGField {
  std::vector<Vec2> vertex_values;
  std::vector<double> edge_values;

  static EGField zeros(const Mesh2D& mesh);
  bool matches(const Mesh2D& mesh) const;

  EGField& operator+=(const EGField& other);
  EGField& operator*=(double alpha);
};

EGField operator+(EGField a, const EGField& b);
EGField operator*(double alpha, EGField v);

/// True when the field vanishes on the whole boundary (vertex values on
/// boundary vertices, edge values on boundary edges).
bool in_homogeneous_space(const EGField& field, const Mesh2D& mesh, double tol = 0.0);

/// Global velocity numbering: vertex v has DOFs (2v, 2v+1), edge e has
/// DOF 2*NV + e.
struct DofMap {
  int num_vertices = 0;
  int num_edges = 0;
  int vertex_dof_offset = 0;
  int edge_dof_offset = 0;
  std::vector<char> constrained;
  std::vector<double> constrained_value;

  explicit DofMap(const Mesh2D& mesh);
  DofMap() = default;

  int size() const { return 2 * num_vertices + num_edges; }
  int vertex_dof(int v, int component) const { return vertex_dof_offset + 2 * v + component; }
  int edge_dof(int e) const { return edge_dof_offset + e; }
  std::array<int, kLocalDofs> local_dofs(const Mesh2D& mesh, int t) const;

  int num_constrained() const;
  /// Free DOFs in increasing order.
  std::vector<int> free_dofs() const;

  Eigen::VectorXd to_vector(const EGField& field) const;
  EGField to_field(const Eigen::VectorXd& values) const;
};

LocalVector gather_local(const Mesh2D& mesh, const EGField& field, int t);

/// (1/|e|) int_e v0 . n ds for v0 linear along the edge.
double qb_edge_average(const Vec2& value_a, const Vec2& value_b, const Vec2& normal);

/// Q_h u = {nodal interpolant, edge averages of u . n_e}. Edge averages use an
/// `edge_points`-point Gauss rule (2 points is exact for cubic traces).
EGField interpolate_Qh(const Mesh2D& mesh, const VectorField& u, int edge_points = 2);

/// Linear map from local DOFs to the constant modified gradient on t.
GradientOperator modified_gradient_operator(const Mesh2D& mesh, int t);
Mat2 modified_gradient_local(const Mesh2D& mesh, int t, const LocalVector& dofs);

/// Modified divergence from the three local edge values.
double modified_divergence_local(const Mesh2D& mesh, int t, const Eigen::Vector3d& edge_dofs);

/// Rows k: the functional Q_b v0n - v_b on local edge k.
Eigen::Matrix<double, 3, kLocalDofs> edge_mismatch_operator(const Mesh2D& mesh, int t);

/// Stabilization kernel h_T^{-1} sum_e |e| (Q_b v0n - v_b)^2 as a 9x9 matrix
/// (without the viscosity factor).
LocalMatrix stab_local(const Mesh2D& mesh, int t);

/// Gradient of the P1 part on t.
Mat2 p1_gradient(const Mesh2D& mesh, int t, const LocalVector& dofs);
/// Scalar curl d(v0y)/dx - d(v0x)/dy of the P1 part, as a row functional.
Eigen::Matrix<double, 1, kLocalDofs> curl_operator(const Mesh2D& mesh, int t);

/// Mesh-dependent energy norm.
double triple_norm(const EGField& field, const Mesh2D& mesh);

/// Throws SingularElementError for elements with |T| < 1e-14 h_T^2.
void check_element(const Mesh2D& mesh, int t);

}  // namespace egns
