#include "egns/reconstruction.hpp"

#include <string>

namespace egns {

RTField reconstruct(const EGField& field) { return RTField{field.edge_values}; }

std::array<Vec2, 3> rt_basis(const Mesh2D& mesh, int t, const Vec2& x) {
  std::array<Vec2, 3> phi;
  const double scale = 0.5 / mesh.area(t);
  for (int k = 0; k < 3; ++k) {
    const int e = mesh.triangle_edges(t)[k];
    phi[k] = (mesh.edge_signs(t)[k] * mesh.edge_length(e) * scale) * (x - mesh.local_vertex(t, k));
  }
  return phi;
}

std::array<Vec2, 3> rt_basis_integrals(const Mesh2D& mesh, int t) {
  // phi_k is affine, so its integral is |T| phi_k(centroid)
  auto phi = rt_basis(mesh, t, mesh.centroid(t));
  for (Vec2& p : phi) p *= mesh.area(t);
  return phi;
}

Vec2 rt_evaluate(const Mesh2D& mesh, const RTField& field, int t, const Vec2& x) {
  const Eigen::Vector3d lambda = mesh.barycentric(t, x);
  if (lambda.minCoeff() < -1e-12) {
    throw OutOfElementError("point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                            ") is outside triangle " + std::to_string(t));
  }
  const auto phi = rt_basis(mesh, t, x);
  Vec2 value = Vec2::Zero();
  for (int k = 0; k < 3; ++k) value += field.edge_coeff[mesh.triangle_edges(t)[k]] * phi[k];
  return value;
}

double rt_divergence(const Mesh2D& mesh, const RTField& field, int t) {
  double flux = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int e = mesh.triangle_edges(t)[k];
    flux += mesh.edge_signs(t)[k] * mesh.edge_length(e) * field.edge_coeff[e];
  }
  return flux / mesh.area(t);
}

}  // namespace egns
