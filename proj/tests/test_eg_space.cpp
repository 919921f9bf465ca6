#include "doctest.h"

#include "egns/eg_space.hpp"
#include "egns/verification.hpp"
#include "support.hpp"

#include <cmath>

using namespace egns;

namespace {

// Four-point Gauss-Legendre on [0, 1].
constexpr double kG4x[4] = {0.5 - 0.4305681557970263, 0.5 - 0.1699905217924281,
                            0.5 + 0.1699905217924281, 0.5 + 0.4305681557970263};
constexpr double kG4w[4] = {0.1739274225337269, 0.3260725774662731, 0.3260725774662731,
                            0.1739274225337269};

// Brute-force modified gradient: test against the four unit tensors and
// integrate the boundary terms with 4-point Gauss on every edge.
Mat2 brute_force_gradient(const Mesh2D& mesh, int t, const LocalVector& dofs) {
  Eigen::Matrix4d mass = Eigen::Matrix4d::Identity() * mesh.area(t);
  Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    const Vec2 pa = mesh.local_vertex(t, a), pb = mesh.local_vertex(t, b);
    const Vec2 va(dofs[local_x(a)], dofs[local_y(a)]), vb(dofs[local_x(b)], dofs[local_y(b)]);
    const int e = mesh.triangle_edges(t)[k];
    const Vec2 n = mesh.outward_normal(t, k);
    const double sign = mesh.edge_normal(e).dot(n);
    const double len = (pb - pa).norm();
    for (int q = 0; q < 4; ++q) {
      const Vec2 v0 = (1 - kG4x[q]) * va + kG4x[q] * vb;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          Mat2 sigma = Mat2::Zero();
          sigma(i, j) = 1.0;
          const Vec2 sn = sigma * n;
          const double term = dofs[local_edge(k)] * sign * n.dot(sn) + cross(n, v0) * cross(n, sn);
          rhs[2 * i + j] += kG4w[q] * len * term;
        }
      }
    }
  }
  const Eigen::Vector4d g = mass.ldlt().solve(rhs);
  Mat2 out;
  out << g[0], g[1], g[2], g[3];
  return out;
}

// h_T^{-1} sum_e |e| (mean of v0 . n_e - v_b)^2 from the raw definition.
double stab_quadratic(const Mesh2D& mesh, int t, const LocalVector& x) {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    const int e = mesh.triangle_edges(t)[k];
    const Vec2 mean = 0.5 * (Vec2(x[local_x(a)], x[local_y(a)]) + Vec2(x[local_x(b)], x[local_y(b)]));
    const double diff = mean.dot(mesh.edge_normal(e)) - x[local_edge(k)];
    sum += mesh.edge_length(e) * diff * diff;
  }
  return sum / mesh.diameter(t);
}

Vec2 random_vec() { return Vec2(test::uniform(), test::uniform()); }

}  // namespace

TEST_CASE("qb_edge_average examples") {
  CHECK(qb_edge_average(Vec2(1, 0), Vec2(1, 0), Vec2(1, 0)) == 1.0);
  CHECK(qb_edge_average(Vec2(0, 0), Vec2(2, 0), Vec2(1, 0)) == 1.0);
  // (x^2, 0) on the edge x = 0 sampled at its endpoints.
  CHECK(qb_edge_average(Vec2(0, 0), Vec2(0, 0), Vec2(1, 0)) == 0.0);
}

TEST_CASE("interpolate_Qh of a constant") {
  const Mesh2D m = test::perturbed_square(3);
  const EGField f = interpolate_Qh(m, [](const Vec2&) { return Vec2(1, 2); });
  for (const Vec2& v : f.vertex_values) CHECK((v - Vec2(1, 2)).norm() == 0.0);
  for (int e = 0; e < m.num_edges(); ++e) {
    CHECK(f.edge_values[e] == doctest::Approx(Vec2(1, 2).dot(m.edge_normal(e))).epsilon(1e-15));
  }
}

TEST_CASE("interpolate_Qh of the vortex matches a fine Simpson edge integral") {
  const Mesh2D m = build_rect_uniform(16, 16);
  const ManufacturedCase c = case_vortex_2d(1.0);
  // Normal traces are cubic on axis-parallel edges but degree 7 on the
  // diagonals, so the default 2-point rule is exact only on the former; 5
  // points are exact everywhere.
  const EGField f2 = interpolate_Qh(m, c.velocity);
  const EGField f5 = interpolate_Qh(m, c.velocity, 5);
  int axis_edges = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
    const Vec2 n = m.edge_normal(e);
    const double ref = test::simpson_edge_average([&](const Vec2& x) { return c.velocity(x).dot(n); }, a, b);
    CHECK(std::abs(f5.edge_values[e] - ref) < 1e-12);
    if (a.x() == b.x() || a.y() == b.y()) {
      ++axis_edges;
      CHECK(std::abs(f2.edge_values[e] - ref) < 1e-12);
    }
  }
  CHECK(axis_edges == 2 * 16 * 17);
}

TEST_CASE("modified gradient matches a brute-force variational solve") {
  const Mesh2D ref = Mesh2D::from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  const Mesh2D m = test::perturbed_square(4);
  for (const Mesh2D* mesh : {&ref, &m}) {
    for (int t = 0; t < mesh->num_triangles(); ++t) {
      LocalVector dofs;
      for (int i = 0; i < kLocalDofs; ++i) dofs[i] = test::uniform();
      const Mat2 g = modified_gradient_local(*mesh, t, dofs);
      const Mat2 oracle = brute_force_gradient(*mesh, t, dofs);
      CHECK((g - oracle).norm() < 1e-12 * (1.0 + oracle.norm()));
    }
  }
}

TEST_CASE("modified gradient annihilates consistent constants") {
  const Mesh2D m = test::perturbed_square(4);
  const Vec2 c = random_vec();
  const EGField f = interpolate_Qh(m, [&](const Vec2&) { return c; });
  for (int t = 0; t < m.num_triangles(); ++t) {
    CHECK(modified_gradient_local(m, t, gather_local(m, f, t)).norm() < 1e-13);
  }
}

TEST_CASE("modified gradient is exact on linear fields") {
  const Mesh2D m = test::perturbed_square(5);
  Mat2 grad;
  grad << test::uniform(), test::uniform(), test::uniform(), test::uniform();
  const Vec2 shift = random_vec();
  const EGField f = interpolate_Qh(m, [&](const Vec2& x) { return Vec2(grad * x + shift); });
  for (int t = 0; t < m.num_triangles(); ++t) {
    CHECK((modified_gradient_local(m, t, gather_local(m, f, t)) - grad).norm() < 1e-12);
  }
}

TEST_CASE("modified divergence on the reference triangle") {
  const Mesh2D ref = Mesh2D::from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  Eigen::Vector3d vb;
  for (int k = 0; k < 3; ++k) vb[k] = ref.edge_signs(0)[k];  // v_b sigma_e = 1
  CHECK(modified_divergence_local(ref, 0, vb) == doctest::Approx(2.0 * (2.0 + std::sqrt(2.0))));
  CHECK(modified_divergence_local(ref, 0, Eigen::Vector3d::Zero()) == 0.0);
}

TEST_CASE("modified divergence of Q_h w equals the element mean of div w for cubic w") {
  const Mesh2D m = test::perturbed_square(4);
  double a[10];
  for (double& v : a) v = test::uniform();
  auto w = [&](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return Vec2(a[0] * x * x * x + a[1] * x * y * y + a[2] * y + a[3] * x * x,
                a[4] * y * y * y + a[5] * x * x * y + a[6] * x + a[7] * x * y + a[8]);
  };
  auto div = [&](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return 3 * a[0] * x * x + a[1] * y * y + 2 * a[3] * x + 3 * a[4] * y * y + a[5] * x * x + a[7] * x;
  };
  const EGField f = interpolate_Qh(m, w);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double mean = test::midpoint_rule(div, m.local_vertex(t, 0), m.local_vertex(t, 1),
                                            m.local_vertex(t, 2)) / m.area(t);
    Eigen::Vector3d vb;
    for (int k = 0; k < 3; ++k) vb[k] = f.edge_values[m.triangle_edges(t)[k]];
    CHECK(modified_divergence_local(m, t, vb) == doctest::Approx(mean).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("modified divergence of a divergence-free linear field vanishes") {
  const Mesh2D m = test::perturbed_square(4);
  const EGField f = interpolate_Qh(m, [](const Vec2& x) { return Vec2(2 * x.x() + x.y(), 3 * x.x() - 2 * x.y()); });
  for (int t = 0; t < m.num_triangles(); ++t) {
    Eigen::Vector3d vb;
    for (int k = 0; k < 3; ++k) vb[k] = f.edge_values[m.triangle_edges(t)[k]];
    CHECK(std::abs(modified_divergence_local(m, t, vb)) < 1e-12);
  }
}

TEST_CASE("stabilization kernel") {
  const Mesh2D m = test::perturbed_square(4);
  Mat2 grad;
  grad << 1.5, -0.3, 0.7, 2.0;
  const EGField lin = interpolate_Qh(m, [&](const Vec2& x) { return Vec2(grad * x); });
  for (int t = 0; t < m.num_triangles(); ++t) {
    const LocalMatrix s = stab_local(m, t);
    CHECK((s - s.transpose()).norm() <= 1e-14 * s.norm());
    const LocalVector x = gather_local(m, lin, t);
    CHECK(std::abs(x.dot(s * x)) < 1e-13);

    for (int k = 0; k < 3; ++k) {
      LocalVector single = LocalVector::Zero();
      single[local_edge(k)] = 1.0;
      const double expected = m.edge_length(m.triangle_edges(t)[k]) / m.diameter(t);
      CHECK(single.dot(s * single) == doctest::Approx(expected).epsilon(1e-14));
    }

    // Central differences are exact for a quadratic form, so a unit step
    // keeps rounding small.
    LocalVector y;
    for (int i = 0; i < kLocalDofs; ++i) y[i] = test::uniform();
    for (int i = 0; i < kLocalDofs; ++i) {
      for (int j = 0; j < kLocalDofs; ++j) {
        LocalVector pp = y, pm = y, mp = y, mm = y;
        pp[i] += 1; pp[j] += 1;
        pm[i] += 1; pm[j] -= 1;
        mp[i] -= 1; mp[j] += 1;
        mm[i] -= 1; mm[j] -= 1;
        const double hess = (stab_quadratic(m, t, pp) - stab_quadratic(m, t, pm) -
                             stab_quadratic(m, t, mp) + stab_quadratic(m, t, mm)) / 4.0;
        // The form is x^T S x, whose Hessian is 2 S.
        CHECK(std::abs(s(i, j) - hess / 2.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("triple norm") {
  const Mesh2D m = test::perturbed_square(4);
  CHECK(triple_norm(EGField::zeros(m), m) == 0.0);
  const EGField v = test::random_homogeneous(m);
  const double n = triple_norm(v, m);
  CHECK(n > 0.0);
  CHECK(triple_norm(-2.5 * v, m) == doctest::Approx(2.5 * n).epsilon(1e-13));
  // A single interior edge value already gives a positive norm.
  EGField e = EGField::zeros(m);
  for (int k = 0; k < m.num_edges(); ++k) {
    if (!m.is_boundary_edge(k)) {
      e.edge_values[k] = 1.0;
      break;
    }
  }
  CHECK(triple_norm(e, m) > 0.0);
}

TEST_CASE("homogeneous-space membership") {
  const Mesh2D m = build_rect_uniform(3, 3);
  EGField v = test::random_homogeneous(m);
  CHECK(in_homogeneous_space(v, m));
  v.edge_values[m.boundary_edges().front()] = 1e-3;
  CHECK_FALSE(in_homogeneous_space(v, m));
}

TEST_CASE("dof map partitions the velocity unknowns") {
  const Mesh2D m = build_rect_uniform(2, 3);
  DofMap dm(m);
  CHECK(dm.size() == 2 * m.num_vertices() + m.num_edges());
  const EGField f = test::random_field(m);
  const Eigen::VectorXd x = dm.to_vector(f);
  const EGField back = dm.to_field(x);
  CHECK(back.vertex_values == f.vertex_values);
  CHECK(back.edge_values == f.edge_values);
  const auto local = dm.local_dofs(m, 0);
  const LocalVector g = gather_local(m, f, 0);
  for (int i = 0; i < kLocalDofs; ++i) CHECK(x[local[i]] == g[i]);
}

TEST_CASE("degenerate triangle is rejected") {
  const Mesh2D m = Mesh2D::from_triangles_unchecked({{0, 0}, {1, 0}, {0.5, 1e-16}}, {{0, 1, 2}});
  CHECK_THROWS_AS(check_element(m, 0), SingularElementError);
  CHECK_THROWS_AS(stab_local(m, 0), SingularElementError);
}
