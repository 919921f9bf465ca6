#include "egns/solver.hpp"

#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace egns {

FlowState FlowState::zeros(const Mesh2D& mesh) {
  FlowState s;
  s.u = EGField::zeros(mesh);
  s.p.values.assign(static_cast<std::size_t>(mesh.num_triangles()), 0.0);
  return s;
}

void NewtonConfig::validate() const {
  if (!(rel_tol > 0.0)) throw ConfigError("newton rel_tol must be positive");
  if (max_iter < 1) throw ConfigError("newton max_iter must be at least 1");
  for (std::size_t i = 0; i < continuation.size(); ++i) {
    if (!(continuation[i] > 0.0)) throw ConfigError("continuation viscosities must be positive");
    if (i > 0 && !(continuation[i] < continuation[i - 1])) {
      throw ConfigError("continuation schedule must be strictly decreasing");
    }
  }
}

void SolveReport::write_log(std::ostream& out) const {
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << (i + 1) << ' ' << std::scientific << history[i] << std::defaultfloat << '\n';
  }
}

// ---- SaddleSolver -----------------------------------------------------------------------

struct SaddleSolver::Impl {
  SparseMatrix kkt;
  std::vector<int> outer;
  std::vector<int> inner;
  Eigen::UmfPackLU<SparseMatrix> lu;
  bool analyzed = false;
  int analyses = 0;
};

SaddleSolver::SaddleSolver() : impl_(std::make_unique<Impl>()) {}
SaddleSolver::~SaddleSolver() = default;
SaddleSolver::SaddleSolver(SaddleSolver&&) noexcept = default;
SaddleSolver& SaddleSolver::operator=(SaddleSolver&&) noexcept = default;

int SaddleSolver::analyses() const { return impl_->analyses; }

namespace {

std::string zero_pivot_message(const SparseMatrix& kkt, int num_free_u) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(kkt);
  std::ostringstream msg;
  msg << "singular saddle-point matrix (" << kkt.rows() << " unknowns)";
  if (lu.info() != Eigen::Success) {
    const std::string detail = lu.lastErrorMessage();
    msg << ": " << detail;
    const auto pos = detail.find_last_of(' ');
    if (pos != std::string::npos) {
      try {
        const int col = std::stoi(detail.substr(pos + 1));
        if (col < num_free_u) {
          msg << " (velocity block, free DOF " << col << ")";
        } else {
          msg << " (pressure block, element " << col - num_free_u << ")";
        }
      } catch (const std::exception&) {
      }
    }
  }
  return msg.str();
}

}  // namespace

FlowState SaddleSolver::solve(const SaddleSystem& s, std::vector<std::string>* warnings) {
  if (!s.constraints_applied) throw SolverError("saddle system solved before applying constraints");
  const DofMap& dm = s.dof_map;
  const int nu = dm.size();
  const int np = static_cast<int>(s.B.rows());
  std::vector<int> free_index(static_cast<std::size_t>(nu), -1);
  int nf = 0;
  for (int i = 0; i < nu; ++i) {
    if (!dm.constrained[i]) free_index[i] = nf++;
  }
  // With a mean constraint the last pressure is pinned to zero (its
  // divergence row is implied by the others for compatible data) and the
  // mean is fixed afterwards; a dense constraint row would ruin the ordering.
  const bool mean = s.mean_constraint.has_value();
  if (mean && static_cast<int>(s.mean_constraint->size()) != np) {
    throw SolverError("mean constraint size does not match the pressure space");
  }
  const int np_kept = mean ? np - 1 : np;
  const int n = nf + np_kept;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(s.A.nonZeros() + 2 * s.B.nonZeros()));
  for (int j = 0; j < nu; ++j) {
    const int fj = free_index[j];
    if (fj < 0) continue;
    for (SparseMatrix::InnerIterator it(s.A, j); it; ++it) {
      const int fi = free_index[it.row()];
      if (fi >= 0) trip.emplace_back(fi, fj, it.value());
    }
    for (SparseMatrix::InnerIterator it(s.B, j); it; ++it) {
      if (it.row() >= np_kept) continue;
      trip.emplace_back(nf + it.row(), fj, it.value());
      trip.emplace_back(fj, nf + it.row(), -it.value());
    }
  }
  Impl& im = *impl_;
  im.kkt.resize(n, n);
  im.kkt.setFromTriplets(trip.begin(), trip.end());
  im.kkt.makeCompressed();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < nu; ++i) {
    if (free_index[i] >= 0) rhs[free_index[i]] = s.rhs_u[i];
  }
  rhs.segment(nf, np_kept) = s.rhs_p.head(np_kept);

  const std::vector<int> outer(im.kkt.outerIndexPtr(), im.kkt.outerIndexPtr() + n + 1);
  const std::vector<int> inner(im.kkt.innerIndexPtr(), im.kkt.innerIndexPtr() + im.kkt.nonZeros());
  if (!im.analyzed || outer != im.outer || inner != im.inner) {
    im.lu.analyzePattern(im.kkt);
    if (im.lu.info() != Eigen::Success) throw SolverError("symbolic factorization failed");
    im.outer = outer;
    im.inner = inner;
    im.analyzed = true;
    ++im.analyses;
  }
  im.lu.factorize(im.kkt);
  if (im.lu.info() != Eigen::Success) {
    im.analyzed = false;
    throw SolverError(zero_pivot_message(im.kkt, nf));
  }
  Eigen::VectorXd x = im.lu.solve(rhs);
  const double rhs_norm = rhs.norm();
  Eigen::VectorXd r = rhs - im.kkt * x;
  if (r.norm() > 1e-10 * rhs_norm) {
    x += im.lu.solve(r);
    r = rhs - im.kkt * x;
  }
  if (!x.allFinite()) throw SolverError("saddle-point solve produced non-finite values");
  const double ru = r.head(nf).norm();
  const double rp = r.segment(nf, np_kept).norm();
  if (ru > 1e-8 * rhs_norm || rp > 1e-8 * rhs_norm) {
    std::ostringstream msg;
    msg << "inaccurate saddle-point solve: |r_u| = " << ru << ", |r_p| = " << rp
        << " with |rhs| = " << rhs_norm << " (check the BLAS library)";
    throw SolverError(msg.str());
  }
  if (warnings && (ru > 1e-10 * rhs_norm || rp > 1e-10 * rhs_norm)) {
    std::ostringstream msg;
    msg << "saddle residuals |r_u| = " << ru << ", |r_p| = " << rp << " exceed 1e-10 * |rhs| = "
        << 1e-10 * rhs_norm;
    warnings->push_back(msg.str());
  }

  FlowState out;
  Eigen::VectorXd u(nu);
  for (int i = 0; i < nu; ++i) u[i] = free_index[i] >= 0 ? x[free_index[i]] : dm.constrained_value[i];
  out.u = dm.to_field(u);
  out.p.values.assign(x.data() + nf, x.data() + nf + np_kept);
  if (mean) {
    const Eigen::VectorXd& m = *s.mean_constraint;
    out.p.values.push_back(0.0);
    const Eigen::Map<Eigen::VectorXd> p(out.p.values.data(), np);
    const double shift = m.dot(p) / m.sum();
    for (double& v : out.p.values) v -= shift;
  }
  return out;
}

FlowState solve_saddle(const SaddleSystem& system, std::vector<std::string>* warnings) {
  SaddleSolver solver;
  return solver.solve(system, warnings);
}

// ---- Newton -------------------------------------------------------------------------------

LinearizedProblem make_linearized(const FlowProblem& problem) {
  auto assembler = std::make_shared<const SystemAssembler>(problem);
  LinearizedProblem lp;
  lp.mesh = problem.mesh;
  lp.nonlinear = problem.convection;
  lp.assemble = [assembler](const EGField& u_n) { return assembler->assemble(u_n); };
  return lp;
}

namespace {

// Free-DOF stacking of (u; p) for the stopping rule.
Eigen::VectorXd stacked(const FlowState& s, const DofMap& dm) {
  const Eigen::VectorXd u = dm.to_vector(s.u);
  const int np = static_cast<int>(s.p.values.size());
  Eigen::VectorXd x(dm.size() - dm.num_constrained() + np);
  int k = 0;
  for (int i = 0; i < dm.size(); ++i) {
    if (!dm.constrained[i]) x[k++] = u[i];
  }
  for (int t = 0; t < np; ++t) x[k++] = s.p.values[t];
  return x;
}

void append_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

}  // namespace

std::pair<FlowState, SolveReport> newton_solve(const LinearizedProblem& problem,
                                               const NewtonConfig& config,
                                               const std::optional<FlowState>& initial,
                                               std::ostream* log) {
  config.validate();
  if (problem.mesh == nullptr || !problem.assemble) throw ConfigError("incomplete linearized problem");
  const Mesh2D& mesh = *problem.mesh;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  FlowState current = initial ? *initial : FlowState::zeros(mesh);
  if (!current.u.matches(mesh) || static_cast<int>(current.p.values.size()) != mesh.num_triangles()) {
    throw ConfigError("initial guess does not match the mesh");
  }
  SolveReport report;
  SaddleSolver solver;
  FlowState best = current;
  double best_update = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= config.max_iter; ++it) {
    const SaddleSystem system = problem.assemble(current.u);
    append_unique(report.warnings, system.warnings);
    std::vector<std::string> solve_warnings;
    FlowState next = solver.solve(system, &solve_warnings);
    append_unique(report.warnings, solve_warnings);

    const Eigen::VectorXd x_new = stacked(next, system.dof_map);
    const Eigen::VectorXd x_old = stacked(current, system.dof_map);
    const double denom = x_new.norm();
    const double update = denom > 0.0 ? (x_new - x_old).norm() / denom : 0.0;
    report.history.push_back(update);
    report.iterations = it;
    report.final_update = update;
    if (log) *log << "newton " << it << ' ' << std::scientific << update << std::defaultfloat << '\n';
    current = std::move(next);
    if (!std::isfinite(update)) break;
    if (update < best_update) {
      best_update = update;
      best = current;
    }
    if (!problem.nonlinear || update < config.rel_tol) {
      report.converged = true;
      report.wall_seconds = elapsed();
      return {std::move(current), std::move(report)};
    }
  }
  report.wall_seconds = elapsed();
  std::ostringstream msg;
  msg << "Newton iteration did not converge in " << report.iterations
      << " iterations (last relative update " << report.final_update << ")";
  throw ConvergenceError(msg.str(), std::move(best), std::move(report));
}

std::vector<double> default_continuation(double nu_target) {
  if (!(nu_target > 0.0)) throw ConfigError("target viscosity must be positive");
  if (nu_target >= 1e-4) return {nu_target};
  std::vector<double> s{1e-3};
  while (s.back() / 2.0 > nu_target) s.push_back(s.back() / 2.0);
  s.push_back(nu_target);
  return s;
}

ContinuationResult nu_continuation(const std::function<LinearizedProblem(double nu)>& family,
                                   const std::vector<double>& schedule, const NewtonConfig& config,
                                   const std::optional<FlowState>& initial, std::ostream* log) {
  if (schedule.empty()) throw ConfigError("empty continuation schedule");
  NewtonConfig stage_config = config;
  stage_config.continuation = schedule;
  stage_config.validate();
  stage_config.continuation.clear();

  ContinuationResult result;
  std::optional<FlowState> guess = initial;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (log) *log << "stage " << k << " nu " << schedule[k] << '\n';
    try {
      auto [state, report] = newton_solve(family(schedule[k]), stage_config, guess, log);
      result.reports.push_back(std::move(report));
      guess = std::move(state);
    } catch (const ConvergenceError& e) {
      std::ostringstream msg;
      msg << "continuation stage " << k << " (nu = " << schedule[k] << ") failed: " << e.what();
      throw ConvergenceError(msg.str(), e.best(), e.report(), static_cast<int>(k));
    }
  }
  result.state = std::move(*guess);
  return result;
}

}  // namespace egns
