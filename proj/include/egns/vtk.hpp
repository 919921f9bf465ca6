#pragma once

#include "egns/solver.hpp"

#include <filesystem>
#include <iosfwd>

namespace egns {

/// Legacy ASCII VTK unstructured grid. Point data: u0 (z = 0). Cell data:
/// p, p_kin, div_m (modified divergence), curl (of u0) and Rv at the centroid.
void write_vtk(const Mesh2D& mesh, const FlowState& state, std::ostream& out,
               const std::string& title = "egns solution");

/// Throws Error naming the path when the file cannot be written.
void write_vtk(const Mesh2D& mesh, const FlowState& state, const std::filesystem::path& path,
               const std::string& title = "egns solution");

}  // namespace egns
