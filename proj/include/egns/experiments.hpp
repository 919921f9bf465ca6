#pragma once

#include "egns/config.hpp"
#include "egns/verification.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace egns {

/// Dirichlet/Neumann setup for channel-like domains: zero velocity on walls
/// (winning at shared vertices), `inlet` on inflow edges, do-nothing outflow.
BoundaryConditions channel_conditions(const std::vector<int>& wall_tags,
                                      const std::vector<int>& inlet_tags,
                                      const std::vector<int>& outlet_tags, VectorField inlet);

/// Parabolic profile with mean speed `speed` across y in [y0, y1].
VectorField parabolic_inlet(double y0, double y1, double speed = 1.0);

struct VortexLevel {
  int n = 0;
  double h = 0.0;  // 1/n
  ErrorNorms errors;
  double triple_norm = 0.0;
  double force_l2 = 0.0;
  std::vector<SolveReport> reports;
  FlowState state;
};

/// Vortex case on the n x n unit-square mesh. An empty schedule is a cold
/// Newton solve at `nu`; otherwise the schedule runs as a continuation.
VortexLevel run_vortex(int n, double nu, const std::vector<double>& schedule,
                       const NewtonConfig& newton = {}, const AssemblyOptions& options = {},
                       int error_degree = 10, std::ostream* log = nullptr);

struct NoflowResult {
  double max_u0x = 0.0;
  double max_u0y = 0.0;
  double max_u0 = 0.0;  // max nodal |u0|
  double max_ub = 0.0;
  SolveReport report;
  FlowState state;
};

NoflowResult run_noflow(int n, double ra, const NewtonConfig& newton = {},
                        const AssemblyOptions& options = {});

struct CavityResult {
  FlowState zero_force;
  FlowState gradient_force;
  double relative_difference = 0.0;  // |u0_1 - u0_2| / |u0_1| in L2
  double edge_difference = 0.0;      // max |u_b,1 - u_b,2|
  /// max_T |(p2 - p1) - Q0 psi| after removing the mean shift.
  double pressure_shift_error = 0.0;
  SolveReport report_zero;
  SolveReport report_gradient;
};

CavityResult run_cavity(int n, double nu, double scale, const NewtonConfig& newton = {},
                        const AssemblyOptions& options = {});

struct StepResult {
  FlowState state;
  SolveReport report;                // last stage
  std::vector<SolveReport> reports;  // one per continuation stage
  RecirculationResult recirculation;
  /// Where u0x turns from negative to nonnegative along the first grid row
  /// above the lower wall downstream of the step (NaN if it never does).
  double reattachment_x = 0.0;
  double h = 0.0;
};

/// Backward-facing step at Re = 1/nu with a parabolic or constant inlet. A
/// schedule with more than one viscosity ending at 1/Re runs as a continuation.
StepResult run_step(double h, double re, const std::string& inlet_profile,
                    const NewtonConfig& newton = {}, const AssemblyOptions& options = {},
                    std::ostream* log = nullptr, const std::vector<double>& schedule = {});

// ---- CLI subcommands: return 0 on success, 1 on solver failure ------------------------

int cmd_converge(const RunConfig& config, std::ostream& out);
int cmd_noflow(const RunConfig& config, std::ostream& out);
int cmd_cavity(const RunConfig& config, std::ostream& out);
int cmd_step(const RunConfig& config, std::ostream& out);
int cmd_run(const RunConfig& config, std::ostream& out);

}  // namespace egns
