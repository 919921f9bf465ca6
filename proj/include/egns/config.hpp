#pragma once

#include "egns/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace egns {

struct MeshSpec {
  /// "rect" (unit square), "step" or "file".
  std::string generator = "rect";
  int n = 32;               // rect: cells per side
  std::vector<int> levels;  // converge: cells per side of each level
  double h = 0.25;          // step: target spacing
  std::filesystem::path path;
};

/// Experiment description read from an INI file. Sections and keys:
///
///   [experiment] name
///   [mesh]       generator, n, levels, h, path
///   [physics]    nu, re, re_convention (step|cylinder), continuation
///                (auto|off|list of viscosities), ra, force_scale
///   [boundary]   wall_tags, inlet_tags, outlet_tags, inlet_profile
///                (parabolic|constant), inlet_speed
///   [newton]     rel_tol, max_iter
///   [quadrature] load_degree, convection_degree, error_degree, neumann_points
///   [assembly]   threads
///   [output]     dir, vtk
///   [noflow]     threshold
///
/// Lists are whitespace separated. Unknown sections or keys are rejected.
struct RunConfig {
  std::string experiment;
  MeshSpec mesh;

  double nu = 1.0;
  std::optional<double> re;
  std::string re_convention = "step";
  std::string continuation = "auto";
  std::vector<double> continuation_list;
  double ra = 1000.0;
  double force_scale = 1.0;

  std::vector<int> wall_tags{1};
  std::vector<int> inlet_tags{2};
  std::vector<int> outlet_tags{3};
  std::string inlet_profile = "parabolic";
  double inlet_speed = 1.0;

  NewtonConfig newton;
  AssemblyOptions assembly;
  bool threads_set = false;
  int error_degree = 10;

  std::filesystem::path out_dir = "out";
  bool vtk = true;
  std::optional<double> noflow_threshold;

  /// nu, or the viscosity implied by re under re_convention
  /// (step: 1/Re, cylinder: 1/(10 Re)).
  double viscosity() const;
  /// Continuation schedule for a target viscosity: empty when off.
  std::vector<double> schedule(double nu_target) const;
};

/// Parses INI text. Relative mesh paths are resolved against `base_dir`.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace egns
