#pragma once

#include "egns/assembly.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace egns {

/// Piecewise-constant pressure, one value per triangle.
struct PressureField {
  std::vector<double> values;
};

struct FlowState {
  EGField u;
  PressureField p;

  static FlowState zeros(const Mesh2D& mesh);
};

struct NewtonConfig {
  double rel_tol = 1e-7;
  int max_iter = 1000;
  /// Viscosities solved in sequence, each warm-starting the next.
  std::vector<double> continuation;

  /// Throws ConfigError on rel_tol <= 0, max_iter < 1 or a schedule that is
  /// not strictly decreasing.
  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  double final_update = 0.0;
  /// Relative update of every iteration; size() == iterations.
  std::vector<double> history;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
  bool converged = false;

  /// One line per iteration: "<index> <relative update>".
  void write_log(std::ostream& out) const;
};

/// Newton (or continuation) failure. Carries the iterate with the smallest
/// update seen and the report of the failing stage.
class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, FlowState best, SolveReport report, int stage = -1)
      : SolverError(what), best_(std::move(best)), report_(std::move(report)), stage_(stage) {}
  const FlowState& best() const { return best_; }
  const SolveReport& report() const { return report_; }
  /// Continuation stage index, or -1 outside a continuation.
  int stage() const { return stage_; }

 private:
  FlowState best_;
  SolveReport report_;
  int stage_;
};

/// Direct solver for the saddle-point system
///   [ A_ff  -B_f^T ]
///   [ B_f    0     ]
/// over free velocity DOFs. With a mean constraint m the pressure is
/// returned with m . p = 0. The symbolic factorization is reused while the
/// sparsity pattern stays the same.
class SaddleSolver {
 public:
  SaddleSolver();
  ~SaddleSolver();
  SaddleSolver(SaddleSolver&&) noexcept;
  SaddleSolver& operator=(SaddleSolver&&) noexcept;

  /// Throws SolverError (naming the zero pivot) when the matrix is singular
  /// and when a residual norm exceeds 1e-8 * |rhs| after one refinement
  /// step. Residual norms above 1e-10 * |rhs| are reported through `warnings`.
  FlowState solve(const SaddleSystem& system, std::vector<std::string>* warnings = nullptr);

  /// Number of symbolic analyses performed so far.
  int analyses() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve.
FlowState solve_saddle(const SaddleSystem& system, std::vector<std::string>* warnings = nullptr);

/// Reassembly closure for the Newton loop. `nonlinear == false` marks a
/// linear problem, which is solved once.
struct LinearizedProblem {
  const Mesh2D* mesh = nullptr;
  std::function<SaddleSystem(const EGField& u_n)> assemble;
  bool nonlinear = true;
};

LinearizedProblem make_linearized(const FlowProblem& problem);

/// Newton iteration from `initial` (zero by default) until the relative
/// update of the free DOFs of (u; p) in the Euclidean norm drops below
/// rel_tol. Throws ConvergenceError after max_iter iterations.
std::pair<FlowState, SolveReport> newton_solve(const LinearizedProblem& problem,
                                               const NewtonConfig& config,
                                               const std::optional<FlowState>& initial = std::nullopt,
                                               std::ostream* log = nullptr);

/// Halving schedule from 1e-3 down to `nu_target`, ending exactly at the
/// target. For nu_target >= 1e-4 the schedule is {nu_target}.
std::vector<double> default_continuation(double nu_target);

struct ContinuationResult {
  FlowState state;
  std::vector<SolveReport> reports;
};

/// Solves the family at each viscosity of `schedule` in turn, warm-starting
/// each stage from the previous one. Throws ConvergenceError naming the stage.
ContinuationResult nu_continuation(const std::function<LinearizedProblem(double nu)>& family,
                                   const std::vector<double>& schedule, const NewtonConfig& config,
                                   const std::optional<FlowState>& initial = std::nullopt,
                                   std::ostream* log = nullptr);

}  // namespace egns
