#pragma once

#include "egns/common.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace egns {

/// Boundary tag conventions used by the built-in generators.
namespace tags {
inline constexpr int kInterior = -1;
inline constexpr int kUntagged = 0;
// build_rect_uniform
inline constexpr int kBottom = 1;
inline constexpr int kRight = 2;
inline constexpr int kTop = 3;
inline constexpr int kLeft = 4;
// build_step_domain
inline constexpr int kWall = 1;
inline constexpr int kInlet = 2;
inline constexpr int kOutlet = 3;
}  // namespace tags

using Triangle = std::array<int, 3>;

/// Tagged boundary segment given by its two endpoint vertices.
struct BoundarySegment {
  int a = 0;
  int b = 0;
  int tag = tags::kUntagged;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

/// Conforming triangulation with edge topology.
///
/// Local edge k of a triangle is the edge opposite local vertex k. Every edge
/// (i, j), i < j, carries a global unit normal n_e: the counterclockwise
/// rotation of (x_j - x_i) / |x_j - x_i|, flipped on the boundary so that it
/// points out of the domain. `edge_signs(t)[k]` is n_e . n with n the outward
/// normal of triangle t on its local edge k.
///
/// Instances are immutable once built.
class Mesh2D {
 public:
  /// Builds topology and throws MeshError on any invariant violation.
  static Mesh2D from_triangles(std::vector<Vec2> vertices,
                               std::vector<Triangle> triangles,
                               std::span<const BoundarySegment> boundary = {});

  /// Classifies a boundary edge by its endpoints; returns the tag.
  using TagClassifier = std::function<int(const Vec2& a, const Vec2& b)>;

  /// As from_triangles, tagging every boundary edge with `classify`.
  static Mesh2D from_triangles(std::vector<Vec2> vertices,
                               std::vector<Triangle> triangles,
                               const TagClassifier& classify);

  /// Builds topology without validation. Used to inspect broken input with
  /// validate_mesh(); edges with more than two incident triangles keep only
  /// the first two in edge_triangles().
  static Mesh2D from_triangles_unchecked(std::vector<Vec2> vertices,
                                         std::vector<Triangle> triangles,
                                         std::span<const BoundarySegment> boundary = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }

  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const Vec2& edge_normal(int e) const { return edge_normal_[e]; }
  double edge_length(int e) const { return edge_length_[e]; }
  Vec2 edge_midpoint(int e) const {
    return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]);
  }
  /// Incident triangles; the second entry is -1 for boundary edges.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }
  int edge_incidence(int e) const { return edge_incidence_[e]; }
  bool is_boundary_edge(int e) const { return edge_incidence_[e] == 1; }
  /// tags::kInterior for interior edges.
  int boundary_tag(int e) const { return boundary_tag_[e]; }

  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  const std::array<int, 3>& edge_signs(int t) const { return edge_signs_[t]; }

  /// Signed area (positive for counterclockwise triangles).
  double area(int t) const { return area_[t]; }
  /// Longest edge of triangle t.
  double diameter(int t) const { return diameter_[t]; }
  /// max_t diameter(t).
  double h() const { return h_; }

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
  std::vector<int> boundary_edges() const;
  std::vector<int> boundary_edges_with_tags(std::span<const int> wanted) const;
  std::vector<int> boundary_tag_values() const;

  /// Local vertex index k (0..2) of triangle t -> coordinates.
  const Vec2& local_vertex(int t, int k) const { return vertices_[triangles_[t][k]]; }
  /// Outward unit normal of triangle t on local edge k.
  Vec2 outward_normal(int t, int k) const {
    return edge_normal_[triangle_edges_[t][k]] * edge_signs_[t][k];
  }
  /// Gradients of the barycentric coordinates (rows k = 0..2).
  Eigen::Matrix<double, 3, 2> barycentric_gradients(int t) const;
  /// Barycentric coordinates of x with respect to triangle t.
  Eigen::Vector3d barycentric(int t, const Vec2& x) const;
  Vec2 centroid(int t) const;

 private:
  Mesh2D() = default;
  static Mesh2D build(std::vector<Vec2> vertices, std::vector<Triangle> triangles);
  void apply_segments(std::span<const BoundarySegment> boundary, bool strict);
  void check_or_throw() const;

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<Vec2> edge_normal_;
  std::vector<double> edge_length_;
  std::vector<std::array<int, 2>> edge_triangles_;
  std::vector<int> edge_incidence_;
  std::vector<int> boundary_tag_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 3>> edge_signs_;
  std::vector<double> area_;
  std::vector<double> diameter_;
  std::vector<bool> boundary_vertex_;
  double h_ = 0.0;
};

/// Uniform nx-by-ny grid of the rectangle, each cell split along its
/// lower-left to upper-right diagonal. Sides are tagged kBottom, kRight,
/// kTop, kLeft; corner vertices belong to both adjacent sides.
Mesh2D build_rect_uniform(int nx, int ny, const Rect& domain = {});

/// Grid spacing actually used by build_step_domain for a requested h.
double step_grid_spacing(double h_target);

/// Backward-facing step (-4,20)x(0,2) minus [-4,0]x[0,1] on a uniform grid of
/// spacing step_grid_spacing(h_target). Tags: kInlet on x=-4, kOutlet on
/// x=20, kWall elsewhere.
Mesh2D build_step_domain(double h_target);

// ---- text format ".m2d" -----------------------------------------------------

/// Reads the .m2d text format. Errors carry the offending line number.
Mesh2D read_mesh(std::istream& in);
Mesh2D import_mesh(const std::filesystem::path& path);
void write_mesh(const Mesh2D& mesh, std::ostream& out);
void export_mesh(const Mesh2D& mesh, const std::filesystem::path& path);

// ---- diagnostics --------------------------------------------------------------

enum class ViolationKind {
  kInvertedTriangle,
  kDegenerateTriangle,
  kRepeatedVertex,
  kNonManifoldEdge,
  kDuplicateIncidence,
  kBoundarySign,
  kNormalLength,
  kClosedBoundary,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int index;  // triangle or edge index, depending on kind
  std::string message;
};

struct MeshReport {
  std::vector<Violation> violations;
  double min_angle = 0.0;  // radians
  double min_area = 0.0;
  double h = 0.0;
  std::vector<double> shape_ratio;  // diameter / inradius per element
  double max_shape_ratio = 0.0;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

MeshReport validate_mesh(const Mesh2D& mesh);

}  // namespace egns
