#pragma once

#include "egns/eg_space.hpp"
#include "egns/mesh.hpp"

#include <Eigen/Sparse>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace egns {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct AssemblyOptions {
  /// Element-loop worker threads. Contributions are merged in element order,
  /// so any thread count yields the same result as a serial loop.
  int threads = 1;
  /// Triangle rule degree for (f, Rv).
  int load_degree = 5;
  /// Triangle rule degree for the trilinear form (its integrand is quadratic).
  int convection_degree = 2;
  /// Gauss points per edge for Neumann data.
  int neumann_points = 3;
};

/// nu (grad_m w, grad_m v) + nu s(w, v) over all velocity DOFs.
SparseMatrix assemble_a(const Mesh2D& mesh, double nu, const AssemblyOptions& options = {});

/// NT x N_u matrix of b(v, q) = (div_m v, q); row t holds sigma_e |e| on the
/// edge DOFs of t.
SparseMatrix assemble_b(const Mesh2D& mesh);

/// Matrix C_w with (C_w z) . v = c(w, z, v).
SparseMatrix assemble_convection(const Mesh2D& mesh, const EGField& w,
                                 const AssemblyOptions& options = {});

/// Newton pieces of the trilinear form at u_n:
/// matrix * z . v = c(u_n, z, v) + c(z, u_n, v), vector . v = c(u_n, u_n, v).
struct LinearizedTerm {
  SparseMatrix matrix;
  Eigen::VectorXd vector;
};

LinearizedTerm assemble_c_linearized(const Mesh2D& mesh, const EGField& u_n,
                                     const AssemblyOptions& options = {});

/// c(w, z, v) evaluated through the assembled convection matrix.
double trilinear_form(const Mesh2D& mesh, const EGField& w, const EGField& z, const EGField& v);

/// (f, R v) for every velocity DOF. Vertex entries are zero.
Eigen::VectorXd assemble_load(const Mesh2D& mesh, const VectorField& f,
                              const AssemblyOptions& options = {});

/// Outflow terms on edges tagged with `neumann_tags`:
/// vector = <n_e x u_N, n_e x v0> + <u_N . n_e, v_b> + d(u_n, u_n, v),
/// matrix = d(u_n, ., v) + d(., u_n, v) with d(w, z, v) = 1/2 <w0 . z0, v_b>.
/// A null `u_N` means zero traction data.
LinearizedTerm assemble_neumann(const Mesh2D& mesh, std::span<const int> neumann_tags,
                                const VectorField& u_N, const EGField& u_n,
                                const AssemblyOptions& options = {});

// ---- boundary conditions ----------------------------------------------------------

/// Dirichlet data on the boundary edges carrying any of `tags`. Where parts
/// with different values meet at a vertex, the higher priority wins.
struct DirichletPart {
  std::vector<int> tags;
  VectorField value;
  int priority = 0;
};

struct BoundaryConditions {
  std::vector<DirichletPart> dirichlet;
  std::vector<int> neumann_tags;
  VectorField neumann_data;  // null: zero traction

  /// Throws ConfigError unless every boundary edge is either Dirichlet or
  /// Neumann (and not both).
  void check(const Mesh2D& mesh) const;
  bool pure_dirichlet() const { return neumann_tags.empty(); }
};

/// Blocks of one linearized step:
///   [ A  -B^T ] [u]   [rhs_u]
///   [ B   0   ] [p] = [rhs_p]   (+ optional zero-mean row on p).
/// After apply_dirichlet, rows/columns of constrained DOFs are to be dropped
/// and their known values are already moved to the right-hand side.
struct SaddleSystem {
  SparseMatrix A;
  SparseMatrix B;
  Eigen::VectorXd rhs_u;
  Eigen::VectorXd rhs_p;
  std::optional<Eigen::VectorXd> mean_constraint;
  DofMap dof_map;
  bool constraints_applied = false;
  std::vector<std::string> warnings;
};

struct DirichletValues {
  std::vector<char> constrained;
  std::vector<double> value;
  std::vector<std::string> notes;
  /// sum over Dirichlet boundary edges of |e| u_b.
  double net_flux = 0.0;
  double perimeter = 0.0;
};

/// Prescribed values: nodal u_D at vertices and edge averages of u_D . n_e
/// (2-point Gauss) on edges.
DirichletValues dirichlet_values(const Mesh2D& mesh, std::span<const DirichletPart> parts);

/// Eliminates the Dirichlet DOFs symmetrically. For a pure Dirichlet problem
/// (`check_compatibility`) the net boundary flux must vanish to
/// 1e-10 * perimeter, otherwise a warning is attached.
SaddleSystem apply_dirichlet(SaddleSystem system, const Mesh2D& mesh,
                             std::span<const DirichletPart> parts, bool check_compatibility);

/// Single-datum convenience form.
SaddleSystem apply_dirichlet(SaddleSystem system, const Mesh2D& mesh, const VectorField& u_D,
                             std::span<const int> tags, bool check_compatibility);

/// A steady Navier-Stokes problem on a fixed mesh.
struct FlowProblem {
  const Mesh2D* mesh = nullptr;
  double nu = 1.0;
  VectorField force;  // null: f = 0
  BoundaryConditions bc;
  /// false drops the trilinear (and outflow d) terms: a Stokes problem.
  bool convection = true;
  AssemblyOptions options;
};

/// Caches the parts of the system that do not depend on the linearization
/// point (a, b, load, Dirichlet data).
class SystemAssembler {
 public:
  explicit SystemAssembler(FlowProblem problem);

  /// Newton system linearized at u_n, with Dirichlet DOFs eliminated.
  SaddleSystem assemble(const EGField& u_n) const;

  const FlowProblem& problem() const { return problem_; }
  const DirichletValues& dirichlet() const { return dirichlet_; }

 private:
  FlowProblem problem_;
  SparseMatrix a_;
  SparseMatrix b_;
  Eigen::VectorXd load_;
  DirichletValues dirichlet_;
};

/// One-shot form of SystemAssembler::assemble.
SaddleSystem assemble_system(const FlowProblem& problem, const EGField& u_n);

/// Writes a sparse matrix in Matrix Market coordinate format.
void export_matrix_market(const SparseMatrix& m, const std::filesystem::path& path);

}  // namespace egns
