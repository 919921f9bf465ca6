// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include "egns/assembly.hpp"
#include "egns/experiments.hpp"
#include "egns/reconstruction.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

using namespace egns;

namespace {

// Reference errors (|u - u0|, |u - u0|_1, |p - p_h|) at h = 1/16 ... 1/128, nu = 1.
const double kPublished[4][3] = {
    {1.440e-3, 8.004e-2, 3.402e-1},
    {3.640e-4, 4.026e-2, 1.702e-1},
    {9.134e-5, 2.017e-2, 8.509e-2},
    {2.287e-5, 1.009e-2, 4.254e-2},
};
const int kLevels[4] = {16, 32, 64, 128};

const double kMinOrders[3] = {1.90, 0.95, 0.95};
const double kMagnitudeFactor = 2.0;
const double kRuntimeC1 = 300.0;
const double kRobustFactor = 1.3;
const double kRuntimeC2 = 900.0;
const double kNoflowThreshold = 1e-6;
const double kCavityThreshold = 1e-6;
const double kEnergyTol = 1e-12;
const double kSkewTol = 1e-13;
const double kDivTol = 1e-12;
const double kTraceTol = 1e-12;
const double kStabilitySlack = 1.01;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::array<double, 3> as_array(const ErrorNorms& e) { return {e.l2_velocity, e.h1_velocity, e.l2_pressure}; }

struct Sweep {
  std::vector<VortexLevel> levels;
  double seconds = 0.0;
  std::string failure;
};

Sweep sweep(double nu) {
  Sweep s;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> schedule = nu < 1e-3 ? default_continuation(nu) : std::vector<double>{};
  try {
    for (int n : kLevels) {
      s.levels.push_back(run_vortex(n, nu, schedule));
      const auto e = as_array(s.levels.back().errors);
      std::cout << "  nu = " << nu << ", n = " << n << ": " << fmt("%.3e %.3e %.3e", e[0], e[1], e[2]) << std::endl;
    }
  } catch (const Error& e) {
    s.failure = e.what();
  }
  s.seconds = seconds_since(t0);
  return s;
}

void criterion_convergence(const Sweep& s) {
  if (!s.failure.empty()) return report(false, "C1 vortex convergence nu = 1", s.failure);
  const auto fine = as_array(s.levels[3].errors), coarse = as_array(s.levels[2].errors);
  bool ok = s.seconds <= kRuntimeC1;
  std::string detail;
  for (int j = 0; j < 3; ++j) {
    const double order = *observed_order(coarse[j], fine[j], 1.0 / 64, 1.0 / 128);
    ok = ok && order >= kMinOrders[j];
    detail += fmt("order %.2f (min %.2f), ", order, kMinOrders[j]);
  }
  double worst = 1.0;
  for (int i = 0; i < 4; ++i) {
    const auto e = as_array(s.levels[i].errors);
    for (int j = 0; j < 3; ++j) {
      const double r = e[j] / kPublished[i][j];
      worst = std::max(worst, std::max(r, 1.0 / r));
    }
  }
  ok = ok && worst <= kMagnitudeFactor;
  detail += fmt("worst magnitude factor %.2f (max %.1f), %.1f s (max %.0f s)", worst, kMagnitudeFactor, s.seconds,
                kRuntimeC1);
  report(ok, "C1 vortex convergence nu = 1", detail);
}

void criterion_robustness(const Sweep& s, const Sweep& reference) {
  if (!s.failure.empty() || !reference.failure.empty()) {
    return report(false, "C2 pressure robustness nu = 1e-5", s.failure + reference.failure);
  }
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto e = as_array(s.levels[i].errors), r = as_array(reference.levels[i].errors);
    for (int j = 0; j < 3; ++j) worst = std::max(worst, e[j] / r[j]);
  }
  const bool ok = worst <= kRobustFactor && s.seconds <= kRuntimeC2;
  report(ok, "C2 pressure robustness nu = 1e-5",
         fmt("max error ratio to nu = 1: %.3f (max %.1f), %.1f s (max %.0f s)", worst, kRobustFactor, s.seconds,
             kRuntimeC2));
}

void criterion_noflow() {
  try {
    const NoflowResult r = run_noflow(32, 1000.0);
    report(r.max_u0 <= kNoflowThreshold, "C3 no-flow Ra = 1000",
           fmt("max |u0| = %.3e (max %.0e)", r.max_u0, kNoflowThreshold));
  } catch (const Error& e) {
    report(false, "C3 no-flow Ra = 1000", e.what());
  }
}

void criterion_cavity() {
  try {
    const CavityResult r = run_cavity(32, 1.0, 1.0);
    report(r.relative_difference <= kCavityThreshold, "C4 cavity gradient-force invariance",
           fmt("relative L2 difference = %.3e (max %.0e)", r.relative_difference, kCavityThreshold));
  } catch (const Error& e) {
    report(false, "C4 cavity gradient-force invariance", e.what());
  }
}

void criterion_properties(const VortexLevel& coarse) {
  const Mesh2D m = test::perturbed_square(6);
  const DofMap dm(m);
  const double nu = 0.37;
  const SparseMatrix a = assemble_a(m, nu);
  double energy = 0.0, skew = 0.0, div = 0.0, trace = 0.0, quasi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const EGField v = test::random_homogeneous(m);
    const Eigen::VectorXd x = dm.to_vector(v);
    const double tn = triple_norm(v, m);
    energy = std::max(energy, std::abs(x.dot(a * x) - nu * tn * tn) / (nu * tn * tn));

    const EGField w = test::random_field(m), z = test::random_field(m);
    const double scale = triple_norm(w, m) * triple_norm(z, m) * triple_norm(z, m) + 1.0;
    skew = std::max(skew, std::abs(trilinear_form(m, w, z, z)) / scale);

    const EGField g = test::random_field(m);
    const RTField r = reconstruct(g);
    for (int t = 0; t < m.num_triangles(); ++t) {
      Eigen::Vector3d vb;
      for (int k = 0; k < 3; ++k) vb[k] = g.edge_values[m.triangle_edges(t)[k]];
      div = std::max(div, std::abs(rt_divergence(m, r, t) - modified_divergence_local(m, t, vb)));
    }
    for (int e = 0; e < m.num_edges(); ++e) {
      const Vec2 mid = 0.5 * (m.vertex(m.edge(e)[0]) + m.vertex(m.edge(e)[1]));
      for (int t : m.edge_triangles(e)) {
        if (t >= 0) trace = std::max(trace, std::abs(rt_evaluate(m, r, t, mid).dot(m.edge_normal(e)) - g.edge_values[e]));
      }
    }
  }

  double c[9];
  for (double& v : c) v = test::uniform();
  auto cubic = [&](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return Vec2(c[0] * x * x * x + c[1] * x * y * y + c[2] * y + c[3] * x * x,
                c[4] * y * y * y + c[5] * x * x * y + c[6] * x + c[7] * x * y + c[8]);
  };
  auto cubic_div = [&](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return 3 * c[0] * x * x + c[1] * y * y + 2 * c[3] * x + 3 * c[4] * y * y + c[5] * x * x + c[7] * x;
  };
  const EGField q = interpolate_Qh(m, cubic);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double mean =
        test::midpoint_rule(cubic_div, m.local_vertex(t, 0), m.local_vertex(t, 1), m.local_vertex(t, 2)) / m.area(t);
    Eigen::Vector3d vb;
    for (int k = 0; k < 3; ++k) vb[k] = q.edge_values[m.triangle_edges(t)[k]];
    quasi = std::max(quasi, std::abs(modified_divergence_local(m, t, vb) - mean));
  }

  const Mesh2D two = build_rect_uniform(2, 2);
  const Eigen::MatrixXd k2(assemble_a(two, 1.0));
  std::vector<int> free;
  const DofMap dm2(two);
  for (int v = 0; v < two.num_vertices(); ++v) {
    if (two.is_boundary_vertex(v)) continue;
    free.push_back(dm2.vertex_dof(v, 0));
    free.push_back(dm2.vertex_dof(v, 1));
  }
  for (int e = 0; e < two.num_edges(); ++e) {
    if (!two.is_boundary_edge(e)) free.push_back(dm2.edge_dof(e));
  }
  Eigen::MatrixXd kf(free.size(), free.size());
  for (std::size_t i = 0; i < free.size(); ++i) {
    for (std::size_t j = 0; j < free.size(); ++j) kf(i, j) = k2(free[i], free[j]);
  }
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(kf).eigenvalues().minCoeff();

  const double bound_ratio = coarse.triple_norm / coarse.force_l2;

  report(energy <= kEnergyTol, "C5a a(v,v) = nu |||v|||^2", fmt("max relative deviation %.2e (max %.0e)", energy, kEnergyTol));
  report(skew <= kSkewTol, "C5b c(v,w,w) = 0", fmt("max scaled value %.2e (max %.0e)", skew, kSkewTol));
  report(div <= kDivTol, "C5c div Rv = div_m v", fmt("max deviation %.2e (max %.0e)", div, kDivTol));
  report(trace <= kTraceTol, "C5d Rv.n = v_b at edge midpoints", fmt("max deviation %.2e (max %.0e)", trace, kTraceTol));
  report(quasi <= kDivTol, "C5e div_m Q_h w = mean div w (cubic w)", fmt("max deviation %.2e (max %.0e)", quasi, kDivTol));
  report(min_eig > 0.0, "C5f 2x2 stiffness positive definite", fmt("min eigenvalue %.4e", min_eig));
  report(bound_ratio <= kStabilitySlack, "C5g |||u_h||| <= |f|/nu", fmt("ratio %.4f (max %.2f) at n = 16, nu = 1", bound_ratio, kStabilitySlack));
}

void criterion_step() {
  try {
    NewtonConfig newton;
    const StepResult r = run_step(0.25, 100.0, "parabolic", newton);
    const Mesh2D mesh = build_step_domain(0.25);
    const RecirculationResult rc = recirculation_detect(mesh, r.state, Rect{0.0, 0.0, 4.0, 1.0});
    report(r.report.converged && rc.detected, "C6 backward-facing step Re = 100",
           fmt("converged in %.0f iterations, min u0x in (0,4)x(0,1) = %.3e, reversed flow up to x = %.2f",
               r.report.iterations, rc.min_ux, rc.reversed_x_max));
  } catch (const Error& e) {
    report(false, "C6 backward-facing step Re = 100", e.what());
  }
}

}  // namespace

int main() {
  std::cout << "vortex sweep, nu = 1" << std::endl;
  const Sweep viscous = sweep(1.0);
  criterion_convergence(viscous);
  std::cout << "vortex sweep, nu = 1e-5 with continuation" << std::endl;
  const Sweep inviscid = sweep(1e-5);
  criterion_robustness(inviscid, viscous);
  criterion_noflow();
  criterion_cavity();
  if (!viscous.levels.empty()) {
    criterion_properties(viscous.levels.front());
  } else {
    report(false, "C5 property suite", "no converged vortex level for the stability bound");
  }
  criterion_step();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
