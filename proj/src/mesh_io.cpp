#include "egns/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace egns {

namespace {

// Yields non-empty, non-comment lines together with their 1-based number.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::istringstream& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      fields.clear();
      fields.str(line);
      return true;
    }
    return false;
  }
  int line() const { return number_; }

 private:
  std::istream& in_;
  int number_ = 0;
};

template <typename... T>
void read_fields(LineReader& reader, const char* what, T&... out) {
  std::istringstream fields;
  if (!reader.next(fields)) {
    throw MeshError(std::string("unexpected end of file while reading ") + what, reader.line() + 1);
  }
  if (!(fields >> ... >> out)) {
    throw MeshError(std::string("cannot parse ") + what, reader.line());
  }
  std::string extra;
  if (fields >> extra) {
    throw MeshError(std::string("trailing data after ") + what, reader.line());
  }
}

}  // namespace

Mesh2D read_mesh(std::istream& in) {
  LineReader reader(in);
  long nv = 0, nt = 0, nb = 0;
  read_fields(reader, "header 'NV NT NB'", nv, nt, nb);
  if (nv < 0 || nt < 0 || nb < 0) throw MeshError("negative count in header", reader.line());

  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    double x = 0, y = 0;
    read_fields(reader, "vertex 'x y'", x, y);
    v = Vec2(x, y);
  }

  std::vector<Triangle> triangles(static_cast<std::size_t>(nt));
  std::vector<int> tri_line(static_cast<std::size_t>(nt));
  std::map<std::pair<int, int>, int> incidence;
  for (long t = 0; t < nt; ++t) {
    Triangle& tri = triangles[static_cast<std::size_t>(t)];
    read_fields(reader, "triangle 'i j k'", tri[0], tri[1], tri[2]);
    const int line = reader.line();
    tri_line[static_cast<std::size_t>(t)] = line;
    const std::string name = "triangle " + std::to_string(t);
    for (int v : tri) {
      if (v < 0 || v >= nv) {
        throw MeshError(name + " references vertex " + std::to_string(v) + " out of range", line);
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError(name + " has a duplicate vertex index", line);
    }
    const Vec2& p0 = vertices[tri[0]];
    const double twice_area = cross(vertices[tri[1]] - p0, vertices[tri[2]] - p0);
    if (twice_area <= 0.0) {
      throw MeshError(name + (twice_area < 0.0 ? " is clockwise (inverted orientation)"
                                               : " is degenerate (zero area)"),
                      line);
    }
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      if (++incidence[{a, b}] > 2) {
        throw MeshError("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") shared by more than two triangles (" + name + ")",
                        line);
      }
    }
  }

  std::vector<BoundarySegment> segments(static_cast<std::size_t>(nb));
  for (auto& s : segments) {
    read_fields(reader, "boundary edge 'i j tag'", s.a, s.b, s.tag);
    int a = s.a, b = s.b;
    if (a > b) std::swap(a, b);
    auto it = incidence.find({a, b});
    if (it == incidence.end() || it->second != 1) {
      throw MeshError("(" + std::to_string(s.a) + ", " + std::to_string(s.b) +
                          ") is not a boundary edge",
                      reader.line());
    }
  }

  std::istringstream rest;
  if (reader.next(rest)) throw MeshError("unexpected trailing content", reader.line());

  return Mesh2D::from_triangles(std::move(vertices), std::move(triangles), segments);
}

Mesh2D import_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  try {
    return read_mesh(in);
  } catch (const MeshError& e) {
    throw MeshError(path.string() + ": " + e.what());
  }
}

void write_mesh(const Mesh2D& mesh, std::ostream& out) {
  const std::vector<int> boundary = mesh.boundary_edges();
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << boundary.size() << '\n';
  out << std::setprecision(17);
  for (const Vec2& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  for (const Triangle& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (int e : boundary) {
    out << mesh.edge(e)[0] << ' ' << mesh.edge(e)[1] << ' ' << mesh.boundary_tag(e) << '\n';
  }
}

void export_mesh(const Mesh2D& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  write_mesh(mesh, out);
  if (!out) throw MeshError("write failed for " + path.string());
}

}  // namespace egns
