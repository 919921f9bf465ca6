#pragma once

#include "egns/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace egns {

/// Exact solution of the rotational-form equations together with the body
/// force that produces it.
struct ManufacturedCase {
  std::string name;
  VectorField velocity;
  TensorField gradient;  // G_ij = d u_i / d x_j
  ScalarField pressure;  // Bernoulli pressure
  VectorField force;
  double nu = 1.0;
  Rect domain;
};

/// -nu lap u + (curl u) x u + grad p by central differences with step `step`.
Vec2 residual_force_fd(const ManufacturedCase& c, const Vec2& x, double step = 1e-5);

/// max |f - f_fd| / max |f| over `samples` points drawn from the domain with
/// a fixed seed (absolute when f vanishes at every sample).
double force_fd_mismatch(const ManufacturedCase& c, int samples = 20, double step = 1e-5);

/// Vortex u = (10 x^2 (x-1)^2 y (y-1) (2y-1), -10 x (x-1) (2x-1) y^2 (y-1)^2),
/// p = 10 (2x-1)(2y-1) on the unit square. The closed-form force is checked
/// against finite differences on construction (throws Error on mismatch).
ManufacturedCase case_vortex_2d(double nu);

/// u = 0, p = -(Ra/2) y^2 + Ra y - Ra/3, f = grad p, nu = 1.
ManufacturedCase case_noflow(double ra = 1000.0);

enum class CavityForce { kZero, kGradient };

/// Lid-driven cavity on the unit square: u = (1, 0) on y = 1, zero elsewhere.
/// kGradient uses f = scale * (1e6/3) grad(x^3 + y^3).
struct CavityCase {
  VectorField force;     // null for kZero
  ScalarField potential; // psi with f = grad psi (null for kZero)
  VectorField lid;
  double nu = 1.0;
};

CavityCase case_cavity(CavityForce variant, double scale = 1.0);

struct ErrorNorms {
  double l2_velocity = 0.0;  // |u - u0|
  double h1_velocity = 0.0;  // broken H1 seminorm of u - u0
  double l2_pressure = 0.0;  // |p - p_h|
};

/// Errors of the discrete solution against exact fields; every element is
/// integrated with the triangle rule of degree `degree`.
ErrorNorms error_norms(const Mesh2D& mesh, const VectorField& u, const TensorField& grad_u,
                       const ScalarField& p, const FlowState& state, int degree = 10);

/// L2 norm of an analytic field over the mesh.
double l2_norm(const Mesh2D& mesh, const VectorField& f, int degree = 10);

/// L2 norm of the continuous part u0 (exact, degree-2 rule).
double l2_norm_u0(const Mesh2D& mesh, const EGField& field);

struct ConvergenceRow {
  double h = 0.0;
  ErrorNorms errors;
  /// Orders against the previous row; empty in the first row or when an
  /// error vanishes.
  std::optional<double> order_l2_velocity;
  std::optional<double> order_h1_velocity;
  std::optional<double> order_l2_pressure;
};

/// Observed order log(e_i / e_j) / log(h_i / h_j); empty if e_i or e_j is 0.
std::optional<double> observed_order(double e_i, double e_j, double h_i, double h_j);

/// Rows with orders between consecutive levels. Throws ConfigError unless h is
/// strictly decreasing and the sizes agree.
std::vector<ConvergenceRow> convergence_table(const std::vector<double>& h,
                                              const std::vector<ErrorNorms>& errors);

/// CSV with header h,e_l2,order,e_h1,order,e_p,order; undefined orders are blank.
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);

/// p_T - (1/(2|T|)) int_T |u0|^2 per element.
PressureField kinematic_pressure(const Mesh2D& mesh, const FlowState& state);

struct RecirculationResult {
  bool detected = false;
  double min_ux = 0.0;
  /// Largest x of a region vertex with reversed flow (NaN if none).
  double reversed_x_max = 0.0;
  int vertices = 0;
};

/// Reversed flow test over the vertices inside `region` (closed box):
/// detected iff min u0x < threshold. Throws Error when no vertex lies inside.
RecirculationResult recirculation_detect(const Mesh2D& mesh, const FlowState& state,
                                         const Rect& region, double threshold = -1e-3);

}  // namespace egns
