#include "egns/vtk.hpp"

#include "egns/reconstruction.hpp"
#include "egns/verification.hpp"

#include <fstream>
#include <ostream>

namespace egns {

void write_vtk(const Mesh2D& mesh, const FlowState& state, std::ostream& out, const std::string& title) {
  if (!state.u.matches(mesh) || static_cast<int>(state.p.values.size()) != mesh.num_triangles()) {
    throw Error("write_vtk: solution does not match mesh");
  }
  const int nv = mesh.num_vertices();
  const int nt = mesh.num_triangles();
  out.precision(17);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec2& x : mesh.vertices()) out << x.x() << ' ' << x.y() << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const Triangle& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) out << "5\n";

  out << "POINT_DATA " << nv << "\nVECTORS u0 double\n";
  for (const Vec2& u : state.u.vertex_values) out << u.x() << ' ' << u.y() << " 0\n";

  const PressureField pkin = kinematic_pressure(mesh, state);
  const RTField rv = reconstruct(state.u);
  out << "CELL_DATA " << nt << "\nSCALARS p double 1\nLOOKUP_TABLE default\n";
  for (double p : state.p.values) out << p << '\n';
  out << "SCALARS p_kin double 1\nLOOKUP_TABLE default\n";
  for (double p : pkin.values) out << p << '\n';
  out << "SCALARS div_m double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t) {
    const auto& te = mesh.triangle_edges(t);
    const Eigen::Vector3d ub(state.u.edge_values[te[0]], state.u.edge_values[te[1]],
                             state.u.edge_values[te[2]]);
    out << modified_divergence_local(mesh, t, ub) << '\n';
  }
  out << "SCALARS curl double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t) {
    const double w = curl_operator(mesh, t) * gather_local(mesh, state.u, t);
    out << w << '\n';
  }
  out << "VECTORS Rv double\n";
  for (int t = 0; t < nt; ++t) {
    const Vec2 r = rt_evaluate(mesh, rv, t, mesh.centroid(t));
    out << r.x() << ' ' << r.y() << " 0\n";
  }
}

void write_vtk(const Mesh2D& mesh, const FlowState& state, const std::filesystem::path& path,
               const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_vtk(mesh, state, out, title);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace egns
