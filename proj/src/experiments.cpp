#include "egns/experiments.hpp"

#include "egns/quadrature.hpp"
#include "egns/vtk.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace egns {

BoundaryConditions channel_conditions(const std::vector<int>& wall_tags,
                                      const std::vector<int>& inlet_tags,
                                      const std::vector<int>& outlet_tags, VectorField inlet) {
  BoundaryConditions bc;
  bc.dirichlet.push_back({wall_tags, [](const Vec2&) { return Vec2::Zero().eval(); }, 1});
  bc.dirichlet.push_back({inlet_tags, std::move(inlet), 0});
  bc.neumann_tags = outlet_tags;
  return bc;
}

VectorField parabolic_inlet(double y0, double y1, double speed) {
  const double scale = 6.0 * speed / ((y1 - y0) * (y1 - y0));
  return [=](const Vec2& x) { return Vec2(scale * (x.y() - y0) * (y1 - x.y()), 0.0); };
}

namespace {

const std::vector<int> kAllSides{tags::kBottom, tags::kRight, tags::kTop, tags::kLeft};

BoundaryConditions square_dirichlet(VectorField value) {
  BoundaryConditions bc;
  bc.dirichlet.push_back({kAllSides, std::move(value), 0});
  return bc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string log_text(const std::vector<SolveReport>& reports) {
  std::ostringstream s;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (reports.size() > 1) s << "# stage " << k << '\n';
    reports[k].write_log(s);
  }
  return s.str();
}

void print_warnings(std::ostream& out, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) out << "warning: " << w << '\n';
}

}  // namespace

VortexLevel run_vortex(int n, double nu, const std::vector<double>& schedule,
                       const NewtonConfig& newton, const AssemblyOptions& options, int error_degree,
                       std::ostream* log) {
  const Mesh2D mesh = build_rect_uniform(n, n);
  const ManufacturedCase exact = case_vortex_2d(nu);
  auto family = [&](double nu_k) {
    FlowProblem fp;
    fp.mesh = &mesh;
    fp.nu = nu_k;
    fp.force = nu_k == nu ? exact.force : case_vortex_2d(nu_k).force;
    fp.bc = square_dirichlet(exact.velocity);
    fp.options = options;
    return make_linearized(fp);
  };
  VortexLevel level;
  level.n = n;
  level.h = 1.0 / n;
  if (schedule.empty()) {
    auto [state, report] = newton_solve(family(nu), newton, std::nullopt, log);
    level.state = std::move(state);
    level.reports.push_back(std::move(report));
  } else {
    ContinuationResult r = nu_continuation(family, schedule, newton, std::nullopt, log);
    level.state = std::move(r.state);
    level.reports = std::move(r.reports);
  }
  level.errors = error_norms(mesh, exact.velocity, exact.gradient, exact.pressure, level.state, error_degree);
  level.triple_norm = triple_norm(level.state.u, mesh);
  level.force_l2 = l2_norm(mesh, exact.force);
  return level;
}

NoflowResult run_noflow(int n, double ra, const NewtonConfig& newton, const AssemblyOptions& options) {
  const Mesh2D mesh = build_rect_uniform(n, n);
  const ManufacturedCase exact = case_noflow(ra);
  FlowProblem fp;
  fp.mesh = &mesh;
  fp.nu = exact.nu;
  fp.force = exact.force;
  fp.bc = square_dirichlet(exact.velocity);
  fp.options = options;
  auto [state, report] = newton_solve(make_linearized(fp), newton);
  NoflowResult r;
  for (const Vec2& u : state.u.vertex_values) {
    r.max_u0x = std::max(r.max_u0x, std::abs(u.x()));
    r.max_u0y = std::max(r.max_u0y, std::abs(u.y()));
    r.max_u0 = std::max(r.max_u0, u.norm());
  }
  for (double ub : state.u.edge_values) r.max_ub = std::max(r.max_ub, std::abs(ub));
  r.report = std::move(report);
  r.state = std::move(state);
  return r;
}

CavityResult run_cavity(int n, double nu, double scale, const NewtonConfig& newton,
                        const AssemblyOptions& options) {
  const Mesh2D mesh = build_rect_uniform(n, n);
  auto solve = [&](const CavityCase& c) {
    FlowProblem fp;
    fp.mesh = &mesh;
    fp.nu = nu;
    fp.force = c.force;
    BoundaryConditions bc;
    bc.dirichlet.push_back({{tags::kBottom, tags::kRight, tags::kLeft},
                            [](const Vec2&) { return Vec2::Zero().eval(); }, 0});
    // lid wins at the two top corners
    bc.dirichlet.push_back({{tags::kTop}, c.lid, 1});
    fp.bc = bc;
    fp.options = options;
    return newton_solve(make_linearized(fp), newton);
  };
  const CavityCase c1 = case_cavity(CavityForce::kZero);
  const CavityCase c2 = case_cavity(CavityForce::kGradient, scale);
  CavityResult r;
  std::tie(r.zero_force, r.report_zero) = solve(c1);
  std::tie(r.gradient_force, r.report_gradient) = solve(c2);

  EGField diff = r.gradient_force.u;
  diff += -1.0 * r.zero_force.u;
  const double base = l2_norm_u0(mesh, r.zero_force.u);
  r.relative_difference = base > 0.0 ? l2_norm_u0(mesh, diff) / base : l2_norm_u0(mesh, diff);
  for (double d : diff.edge_values) r.edge_difference = std::max(r.edge_difference, std::abs(d));

  // p2 - p1 against element means of psi, up to a constant
  const QuadratureRule& rule = quadrature_rule(4);
  std::vector<double> shift(static_cast<std::size_t>(mesh.num_triangles()));
  double mean = 0.0, area = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double psi = 0.0;
    if (c2.potential) {
      const Triangle& tri = mesh.triangle(t);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::Vector3d& l = rule.points[q];
        psi += rule.weights[q] *
               c2.potential(l[0] * mesh.vertex(tri[0]) + l[1] * mesh.vertex(tri[1]) + l[2] * mesh.vertex(tri[2]));
      }
    }
    shift[t] = r.gradient_force.p.values[t] - r.zero_force.p.values[t] - psi;
    mean += mesh.area(t) * shift[t];
    area += mesh.area(t);
  }
  mean /= area;
  for (double s : shift) r.pressure_shift_error = std::max(r.pressure_shift_error, std::abs(s - mean));
  return r;
}

StepResult run_step(double h, double re, const std::string& inlet_profile, const NewtonConfig& newton,
                    const AssemblyOptions& options, std::ostream* log, const std::vector<double>& schedule) {
  if (!(re > 0.0)) throw ConfigError("Reynolds number must be positive");
  const Mesh2D mesh = build_step_domain(h);
  const VectorField inlet = inlet_profile == "constant"
                                ? VectorField([](const Vec2&) { return Vec2(1.0, 0.0); })
                                : parabolic_inlet(1.0, 2.0);
  auto family = [&](double nu) {
    FlowProblem fp;
    fp.mesh = &mesh;
    fp.nu = nu;
    fp.bc = channel_conditions({tags::kWall}, {tags::kInlet}, {tags::kOutlet}, inlet);
    fp.options = options;
    return make_linearized(fp);
  };
  StepResult r;
  r.h = step_grid_spacing(h);
  if (schedule.size() > 1) {
    if (std::abs(schedule.back() * re - 1.0) > 1e-12) {
      throw ConfigError("continuation schedule must end at nu = 1/Re");
    }
    ContinuationResult c = nu_continuation(family, schedule, newton);
    r.state = std::move(c.state);
    r.reports = std::move(c.reports);
    if (log) {
      for (const auto& rep : r.reports) rep.write_log(*log);
    }
  } else {
    SolveReport rep;
    std::tie(r.state, rep) = newton_solve(family(1.0 / re), newton, std::nullopt, log);
    r.reports.push_back(std::move(rep));
  }
  r.report = r.reports.back();
  r.recirculation = recirculation_detect(mesh, r.state, Rect{0.0, 0.0, 4.0, 1.0});

  std::map<double, double> row;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 x = mesh.vertex(v);
    if (x.x() > 0.0 && std::abs(x.y() - r.h) < 1e-9 * r.h) row[x.x()] = r.state.u.vertex_values[v].x();
  }
  r.reattachment_x = std::numeric_limits<double>::quiet_NaN();
  for (auto it = row.begin(), next = std::next(row.begin()); it != row.end() && next != row.end(); ++it, ++next) {
    if (it->second < 0.0 && next->second >= 0.0) {
      r.reattachment_x = it->first + (next->first - it->first) * (-it->second) / (next->second - it->second);
    }
  }
  return r;
}

// ---- subcommands ---------------------------------------------------------------------------

namespace {

std::filesystem::path prepare_out(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  return config.out_dir;
}

Mesh2D config_mesh(const RunConfig& config) {
  if (config.mesh.generator == "rect") return build_rect_uniform(config.mesh.n, config.mesh.n);
  if (config.mesh.generator == "step") return build_step_domain(config.mesh.h);
  return import_mesh(config.mesh.path);
}

}  // namespace

namespace {

int total_iterations(const std::vector<SolveReport>& reports) {
  int n = 0;
  for (const auto& r : reports) n += r.iterations;
  return n;
}

}  // namespace

int cmd_converge(const RunConfig& config, std::ostream& out) {
  const std::vector<int> levels = config.mesh.levels.empty() ? std::vector<int>{config.mesh.n}
                                                             : config.mesh.levels;
  const double nu = config.viscosity();
  const std::vector<double> schedule = config.schedule(nu);
  const auto dir = prepare_out(config);
  std::vector<double> hs;
  std::vector<ErrorNorms> errs;
  std::vector<SolveReport> all_reports;
  int status = 0;
  for (int n : levels) {
    out << "level n = " << n << " (nu = " << nu << ")\n";
    try {
      VortexLevel level = run_vortex(n, nu, schedule.size() > 1 ? schedule : std::vector<double>{},
                                     config.newton, config.assembly, config.error_degree);
      hs.push_back(level.h);
      errs.push_back(level.errors);
      int iters = 0;
      for (const auto& r : level.reports) {
        iters += r.iterations;
        print_warnings(out, r.warnings);
      }
      out << "  newton iterations " << iters << ", errors " << std::scientific << std::setprecision(3)
          << level.errors.l2_velocity << ' ' << level.errors.h1_velocity << ' '
          << level.errors.l2_pressure << std::defaultfloat << '\n';
      all_reports.insert(all_reports.end(), level.reports.begin(), level.reports.end());
    } catch (const ConvergenceError& e) {
      out << "  failed: " << e.what() << '\n';
      status = 1;
      break;
    }
  }
  std::ostringstream csv;
  if (!hs.empty()) write_convergence_csv(convergence_table(hs, errs), csv);
  write_text(dir / "convergence.csv", csv.str());
  write_text(dir / "converge_newton.log", log_text(all_reports));
  out << csv.str();
  return status;
}

int cmd_noflow(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const double threshold = config.noflow_threshold.value_or(1e-9 * config.ra);
  NoflowResult r;
  try {
    r = run_noflow(config.mesh.n, config.ra, config.newton, config.assembly);
  } catch (const ConvergenceError& e) {
    out << "failed: " << e.what() << '\n';
    return 1;
  }
  print_warnings(out, r.report.warnings);
  out << std::scientific << std::setprecision(6);
  out << "max |u0x| = " << r.max_u0x << "\nmax |u0y| = " << r.max_u0y << "\nmax |u0| = " << r.max_u0
      << "\nmax |u_b| = " << r.max_ub << "\nthreshold = " << threshold << '\n' << std::defaultfloat;
  write_text(dir / "noflow_newton.log", log_text({r.report}));
  if (config.vtk) write_vtk(build_rect_uniform(config.mesh.n, config.mesh.n), r.state, dir / "noflow.vtk");
  const bool ok = r.max_u0 <= threshold;
  out << (ok ? "PASS" : "FAIL") << " max |u0| <= threshold\n";
  return ok ? 0 : 1;
}

int cmd_cavity(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  CavityResult r;
  try {
    r = run_cavity(config.mesh.n, config.viscosity(), config.force_scale, config.newton, config.assembly);
  } catch (const ConvergenceError& e) {
    out << "failed: " << e.what() << '\n';
    return 1;
  }
  print_warnings(out, r.report_zero.warnings);
  print_warnings(out, r.report_gradient.warnings);
  out << std::scientific << std::setprecision(6);
  out << "relative L2 velocity difference = " << r.relative_difference
      << "\nmax edge difference = " << r.edge_difference
      << "\npressure shift vs element means of psi (max, after mean removal) = " << r.pressure_shift_error
      << '\n' << std::defaultfloat;
  write_text(dir / "cavity_newton.log", log_text({r.report_zero, r.report_gradient}));
  if (config.vtk) {
    const Mesh2D mesh = build_rect_uniform(config.mesh.n, config.mesh.n);
    write_vtk(mesh, r.zero_force, dir / "cavity_f1.vtk", "cavity f1");
    write_vtk(mesh, r.gradient_force, dir / "cavity_f2.vtk", "cavity f2");
    FlowState diff = r.gradient_force;
    diff.u += -1.0 * r.zero_force.u;
    for (std::size_t t = 0; t < diff.p.values.size(); ++t) diff.p.values[t] -= r.zero_force.p.values[t];
    write_vtk(mesh, diff, dir / "cavity_diff.vtk", "cavity f2 - f1");
  }
  return 0;
}

int cmd_step(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const double re = config.re.value_or(100.0);
  StepResult r;
  std::ostringstream log;
  try {
    r = run_step(config.mesh.h, re, config.inlet_profile, config.newton, config.assembly, &log,
                 config.schedule(1.0 / re));
  } catch (const ConvergenceError& e) {
    write_text(dir / "step_newton.log", log_text({e.report()}));
    out << "failed: " << e.what() << '\n';
    return 1;
  }
  print_warnings(out, r.report.warnings);
  out << "step Re = " << re << ", inlet " << config.inlet_profile << ", h = " << r.h << '\n'
      << "newton iterations " << total_iterations(r.reports) << ", final update " << r.report.final_update << '\n'
      << "recirculation in (0,4)x(0,1): " << (r.recirculation.detected ? "yes" : "no")
      << ", min u0x = " << r.recirculation.min_ux;
  if (r.recirculation.detected) out << ", reversed flow up to x = " << r.recirculation.reversed_x_max;
  out << "\nreattachment along y = " << r.h << ": x = " << r.reattachment_x << '\n';
  write_text(dir / "step_newton.log", log_text(r.reports));
  if (config.vtk) write_vtk(build_step_domain(config.mesh.h), r.state, dir / "step.vtk", "backward-facing step");
  return 0;
}

int cmd_run(const RunConfig& config, std::ostream& out) {
  const auto dir = prepare_out(config);
  const Mesh2D mesh = config_mesh(config);
  const double nu = config.viscosity();
  VectorField inlet;
  if (config.inlet_profile == "constant") {
    const double s = config.inlet_speed;
    inlet = [s](const Vec2&) { return Vec2(s, 0.0); };
  } else {
    double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
    for (int e : mesh.boundary_edges_with_tags(config.inlet_tags)) {
      for (int v : mesh.edge(e)) {
        y0 = std::min(y0, mesh.vertex(v).y());
        y1 = std::max(y1, mesh.vertex(v).y());
      }
    }
    if (!(y1 > y0)) throw ConfigError("parabolic inlet needs inlet edges spanning a y-interval");
    inlet = parabolic_inlet(y0, y1, config.inlet_speed);
  }
  auto family = [&](double nu_k) {
    FlowProblem fp;
    fp.mesh = &mesh;
    fp.nu = nu_k;
    fp.bc = channel_conditions(config.wall_tags, config.inlet_tags, config.outlet_tags, inlet);
    fp.options = config.assembly;
    return make_linearized(fp);
  };
  const std::vector<double> schedule = config.schedule(nu);
  FlowState state;
  std::vector<SolveReport> reports;
  try {
    if (schedule.size() > 1) {
      ContinuationResult c = nu_continuation(family, schedule, config.newton);
      state = std::move(c.state);
      reports = std::move(c.reports);
    } else {
      auto [s, rep] = newton_solve(family(nu), config.newton);
      state = std::move(s);
      reports.push_back(std::move(rep));
    }
  } catch (const ConvergenceError& e) {
    out << "failed: " << e.what() << '\n';
    return 1;
  }
  for (const auto& r : reports) print_warnings(out, r.warnings);
  const PressureField pkin = kinematic_pressure(mesh, state);
  const auto [pmin, pmax] = std::minmax_element(pkin.values.begin(), pkin.values.end());
  out << "nu = " << nu << ", newton iterations " << reports.back().iterations << '\n'
      << "kinematic pressure range [" << *pmin << ", " << *pmax << "]\n";
  write_text(dir / "run_newton.log", log_text(reports));
  if (config.vtk) write_vtk(mesh, state, dir / "run.vtk");
  return 0;
}

}  // namespace egns
