#include "egns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace egns {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Outward normal of a counterclockwise triangle on the directed edge a -> b.
Vec2 outward_of(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  return Vec2(d.y(), -d.x()).normalized();
}

constexpr double kDegenerateFactor = 1e-14;

}  // namespace

Mesh2D Mesh2D::build(std::vector<Vec2> vertices, std::vector<Triangle> triangles) {
  Mesh2D m;
  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);
  const int nv = m.num_vertices();
  const int nt = m.num_triangles();

  for (int t = 0; t < nt; ++t) {
    for (int v : m.triangles_[t]) {
      if (v < 0 || v >= nv) {
        throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                        std::to_string(v) + " outside [0, " + std::to_string(nv) + ")");
      }
    }
  }

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(static_cast<std::size_t>(nt) * 2);
  m.triangle_edges_.resize(nt);
  m.edge_signs_.resize(nt);
  m.area_.resize(nt);
  m.diameter_.resize(nt);

  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = m.triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), m.num_edges());
      const int e = it->second;
      if (inserted) {
        m.edges_.push_back({std::min(a, b), std::max(a, b)});
        m.edge_triangles_.push_back({t, -1});
        m.edge_incidence_.push_back(1);
      } else {
        if (m.edge_incidence_[e] == 1) m.edge_triangles_[e][1] = t;
        ++m.edge_incidence_[e];
      }
      m.triangle_edges_[t][k] = e;
    }
    const Vec2& p0 = m.vertices_[tri[0]];
    const Vec2& p1 = m.vertices_[tri[1]];
    const Vec2& p2 = m.vertices_[tri[2]];
    m.area_[t] = 0.5 * cross(p1 - p0, p2 - p0);
    m.diameter_[t] = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
    m.h_ = std::max(m.h_, m.diameter_[t]);
  }

  const int ne = m.num_edges();
  m.edge_normal_.resize(ne);
  m.edge_length_.resize(ne);
  m.boundary_tag_.assign(ne, tags::kInterior);
  m.boundary_vertex_.assign(nv, false);
  for (int e = 0; e < ne; ++e) {
    const Vec2 d = m.vertices_[m.edges_[e][1]] - m.vertices_[m.edges_[e][0]];
    m.edge_length_[e] = d.norm();
    m.edge_normal_[e] = rotate_ccw(d) / m.edge_length_[e];
    if (m.edge_incidence_[e] == 1) {
      m.boundary_tag_[e] = tags::kUntagged;
      m.boundary_vertex_[m.edges_[e][0]] = true;
      m.boundary_vertex_[m.edges_[e][1]] = true;
    }
  }

  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = m.triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int e = m.triangle_edges_[t][k];
      const Vec2 n = outward_of(m.vertices_[tri[(k + 1) % 3]], m.vertices_[tri[(k + 2) % 3]]);
      if (m.edge_incidence_[e] == 1 && m.edge_normal_[e].dot(n) < 0.0) {
        m.edge_normal_[e] = -m.edge_normal_[e];
      }
    }
  }
  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = m.triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int e = m.triangle_edges_[t][k];
      const Vec2 n = outward_of(m.vertices_[tri[(k + 1) % 3]], m.vertices_[tri[(k + 2) % 3]]);
      m.edge_signs_[t][k] = m.edge_normal_[e].dot(n) >= 0.0 ? 1 : -1;
    }
  }
  return m;
}

void Mesh2D::apply_segments(std::span<const BoundarySegment> boundary, bool strict) {
  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(edges_.size());
  for (int e = 0; e < num_edges(); ++e) lookup.emplace(edge_key(edges_[e][0], edges_[e][1]), e);
  for (const BoundarySegment& s : boundary) {
    auto it = lookup.find(edge_key(s.a, s.b));
    if (it == lookup.end() || !is_boundary_edge(it->second)) {
      if (!strict) continue;
      throw MeshError("boundary segment (" + std::to_string(s.a) + ", " + std::to_string(s.b) +
                      ") is not a boundary edge");
    }
    boundary_tag_[it->second] = s.tag;
  }
}

void Mesh2D::check_or_throw() const {
  const MeshReport report = validate_mesh(*this);
  if (!report.ok()) throw MeshError(report.violations.front().message);
}

Mesh2D Mesh2D::from_triangles(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                              std::span<const BoundarySegment> boundary) {
  Mesh2D m = build(std::move(vertices), std::move(triangles));
  m.check_or_throw();
  m.apply_segments(boundary, true);
  return m;
}

Mesh2D Mesh2D::from_triangles(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                              const TagClassifier& classify) {
  Mesh2D m = build(std::move(vertices), std::move(triangles));
  m.check_or_throw();
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(e)) {
      m.boundary_tag_[e] = classify(m.vertices_[m.edges_[e][0]], m.vertices_[m.edges_[e][1]]);
    }
  }
  return m;
}

Mesh2D Mesh2D::from_triangles_unchecked(std::vector<Vec2> vertices,
                                        std::vector<Triangle> triangles,
                                        std::span<const BoundarySegment> boundary) {
  Mesh2D m = build(std::move(vertices), std::move(triangles));
  m.apply_segments(boundary, false);
  return m;
}

std::vector<int> Mesh2D::boundary_edges() const {
  std::vector<int> out;
  for (int e = 0; e < num_edges(); ++e) {
    if (is_boundary_edge(e)) out.push_back(e);
  }
  return out;
}

std::vector<int> Mesh2D::boundary_edges_with_tags(std::span<const int> wanted) const {
  std::vector<int> out;
  for (int e = 0; e < num_edges(); ++e) {
    if (is_boundary_edge(e) &&
        std::find(wanted.begin(), wanted.end(), boundary_tag_[e]) != wanted.end()) {
      out.push_back(e);
    }
  }
  return out;
}

std::vector<int> Mesh2D::boundary_tag_values() const {
  std::vector<int> out;
  for (int e = 0; e < num_edges(); ++e) {
    if (is_boundary_edge(e)) out.push_back(boundary_tag_[e]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Eigen::Matrix<double, 3, 2> Mesh2D::barycentric_gradients(int t) const {
  // grad lambda_k is the inward normal of local edge k scaled by |e_k| / (2|T|).
  Eigen::Matrix<double, 3, 2> g;
  const double inv = 1.0 / (2.0 * area_[t]);
  for (int k = 0; k < 3; ++k) {
    const Vec2 d = local_vertex(t, (k + 2) % 3) - local_vertex(t, (k + 1) % 3);
    g(k, 0) = -d.y() * inv;
    g(k, 1) = d.x() * inv;
  }
  return g;
}

Eigen::Vector3d Mesh2D::barycentric(int t, const Vec2& x) const {
  Eigen::Vector3d lambda;
  const double inv = 1.0 / (2.0 * area_[t]);
  for (int k = 0; k < 3; ++k) {
    const Vec2& a = local_vertex(t, (k + 1) % 3);
    const Vec2& b = local_vertex(t, (k + 2) % 3);
    lambda[k] = cross(b - a, x - a) * inv;
  }
  return lambda;
}

Vec2 Mesh2D::centroid(int t) const {
  return (local_vertex(t, 0) + local_vertex(t, 1) + local_vertex(t, 2)) / 3.0;
}

// ---- generators ---------------------------------------------------------------

Mesh2D build_rect_uniform(int nx, int ny, const Rect& domain) {
  if (nx < 1 || ny < 1) throw MeshError("grid counts must be >= 1");
  const double w = domain.x1 - domain.x0;
  const double hgt = domain.y1 - domain.y0;
  if (!(w > 0.0) || !(hgt > 0.0)) throw MeshError("degenerate rectangle");

  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? domain.y1 : domain.y0 + hgt * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? domain.x1 : domain.x0 + w * i / nx;
      vertices.emplace_back(x, y);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int ll = id(i, j), lr = id(i + 1, j), ul = id(i, j + 1), ur = id(i + 1, j + 1);
      triangles.push_back({ll, lr, ur});
      triangles.push_back({ll, ur, ul});
    }
  }
  const Rect d = domain;
  return Mesh2D::from_triangles(std::move(vertices), std::move(triangles),
                                [d](const Vec2& a, const Vec2& b) {
                                  if (a.y() == d.y0 && b.y() == d.y0) return tags::kBottom;
                                  if (a.y() == d.y1 && b.y() == d.y1) return tags::kTop;
                                  if (a.x() == d.x0 && b.x() == d.x0) return tags::kLeft;
                                  if (a.x() == d.x1 && b.x() == d.x1) return tags::kRight;
                                  return tags::kUntagged;
                                });
}

double step_grid_spacing(double h_target) {
  if (!(h_target > 0.0)) throw MeshError("step mesh size must be positive");
  const long n = std::max(1L, std::lround(1.0 / h_target));
  return 1.0 / static_cast<double>(n);
}

Mesh2D build_step_domain(double h_target) {
  const int n = static_cast<int>(std::lround(1.0 / step_grid_spacing(h_target)));
  const int nx = 24 * n;
  const int ny = 2 * n;
  // Grid columns i = 0..nx map to x = -4 + i/n; rows j = 0..ny to y = j/n.
  // Cells with i < 4n and j < n lie inside the removed block.
  auto removed_cell = [n](int i, int j) { return i < 4 * n && j < n; };

  std::vector<int> index(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  std::vector<Vec2> vertices;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i < 4 * n && j < n) continue;  // strictly inside or on x=-4/y=0 of the block
      index[static_cast<std::size_t>(j) * (nx + 1) + i] = static_cast<int>(vertices.size());
      vertices.emplace_back(-4.0 + static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  auto id = [&](int i, int j) { return index[static_cast<std::size_t>(j) * (nx + 1) + i]; };
  std::vector<Triangle> triangles;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (removed_cell(i, j)) continue;
      const int ll = id(i, j), lr = id(i + 1, j), ul = id(i, j + 1), ur = id(i + 1, j + 1);
      triangles.push_back({ll, lr, ur});
      triangles.push_back({ll, ur, ul});
    }
  }
  return Mesh2D::from_triangles(std::move(vertices), std::move(triangles),
                                [](const Vec2& a, const Vec2& b) {
                                  if (a.x() == -4.0 && b.x() == -4.0) return tags::kInlet;
                                  if (a.x() == 20.0 && b.x() == 20.0) return tags::kOutlet;
                                  return tags::kWall;
                                });
}

// ---- diagnostics --------------------------------------------------------------

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kInvertedTriangle: return "inverted-triangle";
    case ViolationKind::kDegenerateTriangle: return "degenerate-triangle";
    case ViolationKind::kRepeatedVertex: return "repeated-vertex";
    case ViolationKind::kNonManifoldEdge: return "non-manifold-edge";
    case ViolationKind::kDuplicateIncidence: return "duplicate-edge-incidence";
    case ViolationKind::kBoundarySign: return "boundary-sign";
    case ViolationKind::kNormalLength: return "normal-length";
    case ViolationKind::kClosedBoundary: return "closed-boundary";
  }
  return "unknown";
}

bool MeshReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

MeshReport validate_mesh(const Mesh2D& mesh) {
  MeshReport r;
  auto add = [&r](ViolationKind kind, int index, const std::string& what) {
    r.violations.push_back({kind, index, what});
  };
  const int nt = mesh.num_triangles();
  r.h = mesh.h();
  r.min_area = std::numeric_limits<double>::infinity();
  r.min_angle = std::numbers::pi;
  r.shape_ratio.resize(nt);

  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = mesh.triangle(t);
    const std::string name = "triangle " + std::to_string(t);
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      add(ViolationKind::kRepeatedVertex, t, name + " repeats a vertex index");
    }
    const double area = mesh.area(t);
    const double hT = mesh.diameter(t);
    r.min_area = std::min(r.min_area, area);
    if (std::abs(area) <= kDegenerateFactor * hT * hT) {
      add(ViolationKind::kDegenerateTriangle, t, name + " is degenerate");
    } else if (area < 0.0) {
      add(ViolationKind::kInvertedTriangle, t, name + " is clockwise (negative area)");
    }

    double perimeter = 0.0;
    Vec2 closure = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.triangle_edges(t)[k];
      perimeter += mesh.edge_length(e);
      closure += mesh.edge_length(e) * mesh.edge_signs(t)[k] * mesh.edge_normal(e);
      const Vec2 u = mesh.local_vertex(t, (k + 1) % 3) - mesh.local_vertex(t, k);
      const Vec2 v = mesh.local_vertex(t, (k + 2) % 3) - mesh.local_vertex(t, k);
      const double denom = u.norm() * v.norm();
      if (denom > 0.0) {
        r.min_angle = std::min(r.min_angle, std::acos(std::clamp(u.dot(v) / denom, -1.0, 1.0)));
      }
    }
    if (closure.norm() > 1e-12 * std::max(hT, 1e-300)) {
      add(ViolationKind::kClosedBoundary, t, name + " violates sum |e| sigma n_e = 0");
    }
    const double inradius = 2.0 * std::abs(area) / perimeter;
    r.shape_ratio[t] = inradius > 0.0 ? hT / inradius : std::numeric_limits<double>::infinity();
    r.max_shape_ratio = std::max(r.max_shape_ratio, r.shape_ratio[t]);
  }

  for (int e = 0; e < mesh.num_edges(); ++e) {
    const std::string name = "edge " + std::to_string(e);
    if (std::abs(mesh.edge_normal(e).norm() - 1.0) > 1e-14) {
      add(ViolationKind::kNormalLength, e, name + " normal is not unit length");
    }
    const int count = mesh.edge_incidence(e);
    if (count > 2) {
      add(ViolationKind::kNonManifoldEdge, e,
          name + " is shared by " + std::to_string(count) + " triangles");
    }
    auto sign_in = [&mesh, e](int t) {
      const auto& te = mesh.triangle_edges(t);
      for (int k = 0; k < 3; ++k) {
        if (te[k] == e) return mesh.edge_signs(t)[k];
      }
      return 0;
    };
    const auto [t0, t1] = mesh.edge_triangles(e);
    if (count >= 2 && sign_in(t0) == sign_in(t1)) {
      add(ViolationKind::kDuplicateIncidence, e,
          name + " has two incident triangles on the same side");
    }
    if (count == 1 && sign_in(t0) != 1) {
      add(ViolationKind::kBoundarySign, e, name + " boundary normal does not point outward");
    }
  }
  if (nt == 0) r.min_area = 0.0;
  return r;
}

}  // namespace egns
