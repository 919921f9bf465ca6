#pragma once

// Helpers shared by the unit tests: random fields and small independent
// integration rules that do not go through the library's quadrature tables.

#include "egns/eg_space.hpp"
#include "egns/mesh.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <random>

namespace egns::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(987654321ULL);
  return engine;
}

inline double uniform(double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline EGField random_field(const Mesh2D& mesh) {
  EGField f = EGField::zeros(mesh);
  for (auto& v : f.vertex_values) v = Vec2(uniform(), uniform());
  for (auto& b : f.edge_values) b = uniform();
  return f;
}

/// Random field vanishing on the whole boundary.
inline EGField random_homogeneous(const Mesh2D& mesh) {
  EGField f = random_field(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary_vertex(v)) f.vertex_values[v] = Vec2::Zero();
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) f.edge_values[e] = 0.0;
  }
  return f;
}

/// Unit square grid with interior vertices displaced by up to `amount` of
/// the cell size, to avoid symmetric meshes hiding sign errors.
inline Mesh2D perturbed_square(int n, double amount = 0.2) {
  const Mesh2D base = build_rect_uniform(n, n);
  std::vector<Vec2> vertices = base.vertices();
  for (int v = 0; v < base.num_vertices(); ++v) {
    if (!base.is_boundary_vertex(v)) {
      vertices[v] += Vec2(uniform(-amount, amount), uniform(-amount, amount)) / n;
    }
  }
  return Mesh2D::from_triangles(vertices, base.triangles(),
                                [](const Vec2&, const Vec2&) { return tags::kBottom; });
}

/// Composite Simpson rule for (1/|e|) int_e g ds along the segment a-b.
inline double simpson_edge_average(const std::function<double(const Vec2&)>& g, const Vec2& a,
                                   const Vec2& b, int panels = 2000) {
  const double step = 1.0 / panels;
  double sum = g(a) + g(b);
  for (int i = 1; i < panels; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * g(a + (i * step) * (b - a));
  }
  return sum * step / 3.0;
}

/// Edge-midpoint rule on a triangle: exact for quadratics. Returns int_T g.
inline double midpoint_rule(const std::function<double(const Vec2&)>& g, const Vec2& p0,
                            const Vec2& p1, const Vec2& p2) {
  const double area = 0.5 * std::abs((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
  return area / 3.0 * (g(0.5 * (p0 + p1)) + g(0.5 * (p1 + p2)) + g(0.5 * (p2 + p0)));
}

/// Gradient of the linear function through (p_k, f_k), by solving the 2x2
/// system directly.
inline Vec2 linear_gradient(const std::array<Vec2, 3>& p, const std::array<double, 3>& f) {
  Mat2 m;
  m.row(0) = (p[1] - p[0]).transpose();
  m.row(1) = (p[2] - p[0]).transpose();
  return m.inverse() * Vec2(f[1] - f[0], f[2] - f[0]);
}

}  // namespace egns::test
