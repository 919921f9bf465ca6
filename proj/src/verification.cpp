#include "egns/verification.hpp"

#include "egns/quadrature.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace egns {

Vec2 residual_force_fd(const ManufacturedCase& c, const Vec2& x, double step) {
  const Vec2 ex(step, 0.0), ey(0.0, step);
  const Vec2 u = c.velocity(x);
  const Vec2 lap = (c.velocity(x + ex) + c.velocity(x - ex) + c.velocity(x + ey) +
                    c.velocity(x - ey) - 4.0 * u) /
                   (step * step);
  const double dx_u2 = (c.velocity(x + ex).y() - c.velocity(x - ex).y()) / (2.0 * step);
  const double dy_u1 = (c.velocity(x + ey).x() - c.velocity(x - ey).x()) / (2.0 * step);
  const double omega = dx_u2 - dy_u1;
  const Vec2 grad_p((c.pressure(x + ex) - c.pressure(x - ex)) / (2.0 * step),
                    (c.pressure(x + ey) - c.pressure(x - ey)) / (2.0 * step));
  return -c.nu * lap + omega * rotate_ccw(u) + grad_p;
}

double force_fd_mismatch(const ManufacturedCase& c, int samples, double step) {
  std::mt19937 rng(20240611u);
  std::uniform_real_distribution<double> ux(c.domain.x0 + 0.01, c.domain.x1 - 0.01);
  std::uniform_real_distribution<double> uy(c.domain.y0 + 0.01, c.domain.y1 - 0.01);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec2 x(ux(rng), uy(rng));
    const Vec2 f = c.force(x);
    worst = std::max(worst, (f - residual_force_fd(c, x, step)).norm());
    scale = std::max(scale, f.norm());
  }
  return scale > 0.0 ? worst / scale : worst;
}

namespace {

// phi(s) = s^2 (s-1)^2 and its derivatives.
double phi0(double s) { return s * s * (s - 1.0) * (s - 1.0); }
double phi1(double s) { return 4.0 * s * s * s - 6.0 * s * s + 2.0 * s; }
double phi2(double s) { return 12.0 * s * s - 12.0 * s + 2.0; }
double phi3(double s) { return 24.0 * s - 12.0; }

void check_force(const ManufacturedCase& c) {
  const double mismatch = force_fd_mismatch(c);
  if (!(mismatch < 1e-6)) {
    std::ostringstream msg;
    msg << c.name << ": closed-form force disagrees with finite differences (" << mismatch << ")";
    throw Error(msg.str());
  }
}

}  // namespace

ManufacturedCase case_vortex_2d(double nu) {
  if (!(nu > 0.0)) throw ConfigError("viscosity must be positive");
  ManufacturedCase c;
  c.name = "vortex";
  c.nu = nu;
  // u = 5 (phi(x) phi'(y), -phi'(x) phi(y))
  c.velocity = [](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return Vec2(5.0 * phi0(x) * phi1(y), -5.0 * phi1(x) * phi0(y));
  };
  c.gradient = [](const Vec2& p) {
    const double x = p.x(), y = p.y();
    Mat2 g;
    g << 5.0 * phi1(x) * phi1(y), 5.0 * phi0(x) * phi2(y),
        -5.0 * phi2(x) * phi0(y), -5.0 * phi1(x) * phi1(y);
    return g;
  };
  c.pressure = [](const Vec2& p) { return 10.0 * (2.0 * p.x() - 1.0) * (2.0 * p.y() - 1.0); };
  c.force = [nu](const Vec2& p) {
    const double x = p.x(), y = p.y();
    const Vec2 u(5.0 * phi0(x) * phi1(y), -5.0 * phi1(x) * phi0(y));
    const Vec2 lap(5.0 * (phi2(x) * phi1(y) + phi0(x) * phi3(y)),
                   -5.0 * (phi3(x) * phi0(y) + phi1(x) * phi2(y)));
    const double omega = -5.0 * (phi2(x) * phi0(y) + phi0(x) * phi2(y));
    const Vec2 grad_p(20.0 * (2.0 * y - 1.0), 20.0 * (2.0 * x - 1.0));
    return Vec2(-nu * lap + omega * rotate_ccw(u) + grad_p);
  };
  check_force(c);
  return c;
}

ManufacturedCase case_noflow(double ra) {
  ManufacturedCase c;
  c.name = "noflow";
  c.nu = 1.0;
  c.velocity = [](const Vec2&) { return Vec2::Zero().eval(); };
  c.gradient = [](const Vec2&) { return Mat2::Zero().eval(); };
  c.pressure = [ra](const Vec2& p) { return -0.5 * ra * p.y() * p.y() + ra * p.y() - ra / 3.0; };
  c.force = [ra](const Vec2& p) { return Vec2(0.0, ra * (1.0 - p.y())); };
  check_force(c);
  return c;
}

CavityCase case_cavity(CavityForce variant, double scale) {
  CavityCase c;
  c.lid = [](const Vec2&) { return Vec2(1.0, 0.0); };
  if (variant == CavityForce::kGradient) {
    const double k = 1e6 * scale;
    c.force = [k](const Vec2& p) { return Vec2(k * p.x() * p.x(), k * p.y() * p.y()); };
    c.potential = [k](const Vec2& p) {
      return k / 3.0 * (p.x() * p.x() * p.x() + p.y() * p.y() * p.y());
    };
  }
  return c;
}

// ---- norms ------------------------------------------------------------------------------

ErrorNorms error_norms(const Mesh2D& mesh, const VectorField& u, const TensorField& grad_u,
                       const ScalarField& p, const FlowState& state, int degree) {
  if (!state.u.matches(mesh) || static_cast<int>(state.p.values.size()) != mesh.num_triangles()) {
    throw Error("error_norms: solution does not match mesh");
  }
  const QuadratureRule& rule = quadrature_rule(degree);
  double eu = 0.0, eg = 0.0, ep = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangle(t);
    const LocalVector d = gather_local(mesh, state.u, t);
    const Mat2 g0 = p1_gradient(mesh, t, d);
    const Vec2& a = mesh.vertex(tri[0]);
    const Vec2& b = mesh.vertex(tri[1]);
    const Vec2& c = mesh.vertex(tri[2]);
    double su = 0.0, sg = 0.0, sp = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const Vec2 x = l[0] * a + l[1] * b + l[2] * c;
      const Vec2 u0 = l[0] * state.u.vertex_values[tri[0]] + l[1] * state.u.vertex_values[tri[1]] +
                      l[2] * state.u.vertex_values[tri[2]];
      su += rule.weights[q] * (u(x) - u0).squaredNorm();
      sg += rule.weights[q] * (grad_u(x) - g0).squaredNorm();
      const double dp = p(x) - state.p.values[t];
      sp += rule.weights[q] * dp * dp;
    }
    eu += mesh.area(t) * su;
    eg += mesh.area(t) * sg;
    ep += mesh.area(t) * sp;
  }
  return {std::sqrt(eu), std::sqrt(eg), std::sqrt(ep)};
}

double l2_norm(const Mesh2D& mesh, const VectorField& f, int degree) {
  if (!f) return 0.0;
  const QuadratureRule& rule = quadrature_rule(degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangle(t);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const Vec2 x = l[0] * mesh.vertex(tri[0]) + l[1] * mesh.vertex(tri[1]) + l[2] * mesh.vertex(tri[2]);
      s += rule.weights[q] * f(x).squaredNorm();
    }
    sum += mesh.area(t) * s;
  }
  return std::sqrt(sum);
}

double l2_norm_u0(const Mesh2D& mesh, const EGField& field) {
  const QuadratureRule& rule = quadrature_rule(2);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangle(t);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const Vec2 u0 = l[0] * field.vertex_values[tri[0]] + l[1] * field.vertex_values[tri[1]] +
                      l[2] * field.vertex_values[tri[2]];
      s += rule.weights[q] * u0.squaredNorm();
    }
    sum += mesh.area(t) * s;
  }
  return std::sqrt(sum);
}

// ---- convergence tables -------------------------------------------------------------------

std::optional<double> observed_order(double e_i, double e_j, double h_i, double h_j) {
  if (!(e_i > 0.0) || !(e_j > 0.0)) return std::nullopt;
  return std::log(e_i / e_j) / std::log(h_i / h_j);
}

std::vector<ConvergenceRow> convergence_table(const std::vector<double>& h,
                                              const std::vector<ErrorNorms>& errors) {
  if (h.size() != errors.size()) throw ConfigError("convergence_table: size mismatch");
  if (h.empty()) throw ConfigError("convergence_table: no levels");
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < h.size(); ++i) {
    ConvergenceRow r;
    r.h = h[i];
    r.errors = errors[i];
    if (i > 0) {
      if (!(h[i] < h[i - 1])) throw ConfigError("convergence_table: h must be strictly decreasing");
      const ErrorNorms& e0 = errors[i - 1];
      r.order_l2_velocity = observed_order(e0.l2_velocity, errors[i].l2_velocity, h[i - 1], h[i]);
      r.order_h1_velocity = observed_order(e0.h1_velocity, errors[i].h1_velocity, h[i - 1], h[i]);
      r.order_l2_pressure = observed_order(e0.l2_pressure, errors[i].l2_pressure, h[i - 1], h[i]);
    }
    rows.push_back(r);
  }
  return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
  auto order = [](const std::optional<double>& o) {
    if (!o) return std::string();
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << *o;
    return s.str();
  };
  out << "h,e_l2,order,e_h1,order,e_p,order\n";
  for (const ConvergenceRow& r : rows) {
    std::ostringstream line;
    line << std::setprecision(6) << r.h << ',' << std::scientific << std::setprecision(3)
         << r.errors.l2_velocity << ',' << order(r.order_l2_velocity) << ',' << r.errors.h1_velocity
         << ',' << order(r.order_h1_velocity) << ',' << r.errors.l2_pressure << ','
         << order(r.order_l2_pressure);
    out << line.str() << '\n';
  }
}

// ---- diagnostics -------------------------------------------------------------------------

PressureField kinematic_pressure(const Mesh2D& mesh, const FlowState& state) {
  const QuadratureRule& rule = quadrature_rule(2);
  PressureField out;
  out.values.resize(static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangle(t);
    double mean = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const Vec2 u0 = l[0] * state.u.vertex_values[tri[0]] + l[1] * state.u.vertex_values[tri[1]] +
                      l[2] * state.u.vertex_values[tri[2]];
      mean += rule.weights[q] * u0.squaredNorm();
    }
    out.values[t] = state.p.values[t] - 0.5 * mean;
  }
  return out;
}

RecirculationResult recirculation_detect(const Mesh2D& mesh, const FlowState& state,
                                         const Rect& region, double threshold) {
  RecirculationResult r;
  r.min_ux = std::numeric_limits<double>::infinity();
  r.reversed_x_max = std::numeric_limits<double>::quiet_NaN();
  const double tol = 1e-12;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2& x = mesh.vertex(v);
    if (x.x() < region.x0 - tol || x.x() > region.x1 + tol || x.y() < region.y0 - tol ||
        x.y() > region.y1 + tol) {
      continue;
    }
    ++r.vertices;
    const double ux = state.u.vertex_values[v].x();
    r.min_ux = std::min(r.min_ux, ux);
    if (ux < threshold && !(x.x() <= r.reversed_x_max)) r.reversed_x_max = x.x();
  }
  if (r.vertices == 0) throw Error("recirculation_detect: no mesh vertex inside the region");
  r.detected = r.min_ux < threshold;
  return r;
}

}  // namespace egns
