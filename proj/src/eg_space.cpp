#include "egns/eg_space.hpp"

#include "egns/quadrature.hpp"

#include <cmath>
#include <string>

namespace egns {

EGField EGField::zeros(const Mesh2D& mesh) {
  EGField f;
  f.vertex_values.assign(mesh.num_vertices(), Vec2::Zero());
  f.edge_values.assign(mesh.num_edges(), 0.0);
  return f;
}

bool EGField::matches(const Mesh2D& mesh) const {
  return static_cast<int>(vertex_values.size()) == mesh.num_vertices() &&
         static_cast<int>(edge_values.size()) == mesh.num_edges();
}

EGField& EGField::operator+=(const EGField& other) {
  for (std::size_t i = 0; i < vertex_values.size(); ++i) vertex_values[i] += other.vertex_values[i];
  for (std::size_t i = 0; i < edge_values.size(); ++i) edge_values[i] += other.edge_values[i];
  return *this;
}

EGField& EGField::operator*=(double alpha) {
  for (Vec2& v : vertex_values) v *= alpha;
  for (double& v : edge_values) v *= alpha;
  return *this;
}

EGField operator+(EGField a, const EGField& b) { return a += b; }
EGField operator*(double alpha, EGField v) { return v *= alpha; }

bool in_homogeneous_space(const EGField& field, const Mesh2D& mesh, double tol) {
  if (!field.matches(mesh)) return false;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary_vertex(v) && field.vertex_values[v].lpNorm<Eigen::Infinity>() > tol) {
      return false;
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e) && std::abs(field.edge_values[e]) > tol) return false;
  }
  return true;
}

// ---- DofMap ---------------------------------------------------------------------

DofMap::DofMap(const Mesh2D& mesh)
    : num_vertices(mesh.num_vertices()),
      num_edges(mesh.num_edges()),
      vertex_dof_offset(0),
      edge_dof_offset(2 * mesh.num_vertices()),
      constrained(static_cast<std::size_t>(size()), 0),
      constrained_value(static_cast<std::size_t>(size()), 0.0) {}

std::array<int, kLocalDofs> DofMap::local_dofs(const Mesh2D& mesh, int t) const {
  const Triangle& tri = mesh.triangle(t);
  const auto& te = mesh.triangle_edges(t);
  std::array<int, kLocalDofs> d{};
  for (int k = 0; k < 3; ++k) {
    d[local_x(k)] = vertex_dof(tri[k], 0);
    d[local_y(k)] = vertex_dof(tri[k], 1);
    d[local_edge(k)] = edge_dof(te[k]);
  }
  return d;
}

int DofMap::num_constrained() const {
  int n = 0;
  for (char c : constrained) n += c ? 1 : 0;
  return n;
}

std::vector<int> DofMap::free_dofs() const {
  std::vector<int> out;
  out.reserve(constrained.size());
  for (int i = 0; i < size(); ++i) {
    if (!constrained[i]) out.push_back(i);
  }
  return out;
}

Eigen::VectorXd DofMap::to_vector(const EGField& field) const {
  Eigen::VectorXd x(size());
  for (int v = 0; v < num_vertices; ++v) {
    x[vertex_dof(v, 0)] = field.vertex_values[v].x();
    x[vertex_dof(v, 1)] = field.vertex_values[v].y();
  }
  for (int e = 0; e < num_edges; ++e) x[edge_dof(e)] = field.edge_values[e];
  return x;
}

EGField DofMap::to_field(const Eigen::VectorXd& x) const {
  EGField f;
  f.vertex_values.resize(num_vertices);
  f.edge_values.resize(num_edges);
  for (int v = 0; v < num_vertices; ++v) {
    f.vertex_values[v] = Vec2(x[vertex_dof(v, 0)], x[vertex_dof(v, 1)]);
  }
  for (int e = 0; e < num_edges; ++e) f.edge_values[e] = x[edge_dof(e)];
  return f;
}

LocalVector gather_local(const Mesh2D& mesh, const EGField& field, int t) {
  LocalVector d;
  const Triangle& tri = mesh.triangle(t);
  const auto& te = mesh.triangle_edges(t);
  for (int k = 0; k < 3; ++k) {
    d[local_x(k)] = field.vertex_values[tri[k]].x();
    d[local_y(k)] = field.vertex_values[tri[k]].y();
    d[local_edge(k)] = field.edge_values[te[k]];
  }
  return d;
}

// ---- projections ----------------------------------------------------------------

double qb_edge_average(const Vec2& value_a, const Vec2& value_b, const Vec2& normal) {
  return 0.5 * (value_a + value_b).dot(normal);
}

EGField interpolate_Qh(const Mesh2D& mesh, const VectorField& u, int edge_points) {
  const LineRule& rule = gauss_line(edge_points);
  EGField f = EGField::zeros(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v) f.vertex_values[v] = u(mesh.vertex(v));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec2& a = mesh.vertex(mesh.edge(e)[0]);
    const Vec2& b = mesh.vertex(mesh.edge(e)[1]);
    const Vec2& n = mesh.edge_normal(e);
    double avg = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double s = rule.points[q];
      avg += rule.weights[q] * u((1.0 - s) * a + s * b).dot(n);
    }
    f.edge_values[e] = avg;
  }
  return f;
}

// ---- element operators ------------------------------------------------------------

void check_element(const Mesh2D& mesh, int t) {
  const double hT = mesh.diameter(t);
  if (!(mesh.area(t) >= 1e-14 * hT * hT)) {
    throw SingularElementError("triangle " + std::to_string(t) + " is degenerate (area " +
                               std::to_string(mesh.area(t)) + ")");
  }
}

GradientOperator modified_gradient_operator(const Mesh2D& mesh, int t) {
  check_element(mesh, t);
  GradientOperator g = GradientOperator::Zero();
  const double inv_area = 1.0 / mesh.area(t);
  const auto& te = mesh.triangle_edges(t);
  for (int k = 0; k < 3; ++k) {
    const int e = te[k];
    const double len = mesh.edge_length(e) * inv_area;
    const Vec2 n = mesh.outward_normal(t, k);
    const Vec2 tan = rotate_ccw(n);
    const double sigma = mesh.edge_signs(t)[k];
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const int row = 2 * i + j;
        // <v_b n_e.n, n.sigma.n>: normal part carried by the enrichment
        g(row, local_edge(k)) += len * sigma * n[i] * n[j];
        // <n x v0, n x sigma.n>: tangential part from the edge mean of v0
        const double coef = 0.5 * len * tan[i] * n[j];
        for (int m : {(k + 1) % 3, (k + 2) % 3}) {
          g(row, local_x(m)) += coef * tan.x();
          g(row, local_y(m)) += coef * tan.y();
        }
      }
    }
  }
  return g;
}

Mat2 modified_gradient_local(const Mesh2D& mesh, int t, const LocalVector& dofs) {
  const Eigen::Vector4d g = modified_gradient_operator(mesh, t) * dofs;
  Mat2 out;
  out << g[0], g[1], g[2], g[3];
  return out;
}

double modified_divergence_local(const Mesh2D& mesh, int t, const Eigen::Vector3d& edge_dofs) {
  check_element(mesh, t);
  double flux = 0.0;
  for (int k = 0; k < 3; ++k) {
    flux += mesh.edge_length(mesh.triangle_edges(t)[k]) * mesh.edge_signs(t)[k] * edge_dofs[k];
  }
  return flux / mesh.area(t);
}

Eigen::Matrix<double, 3, kLocalDofs> edge_mismatch_operator(const Mesh2D& mesh, int t) {
  Eigen::Matrix<double, 3, kLocalDofs> op = Eigen::Matrix<double, 3, kLocalDofs>::Zero();
  for (int k = 0; k < 3; ++k) {
    const Vec2& ne = mesh.edge_normal(mesh.triangle_edges(t)[k]);
    for (int m : {(k + 1) % 3, (k + 2) % 3}) {
      op(k, local_x(m)) = 0.5 * ne.x();
      op(k, local_y(m)) = 0.5 * ne.y();
    }
    op(k, local_edge(k)) = -1.0;
  }
  return op;
}

LocalMatrix stab_local(const Mesh2D& mesh, int t) {
  check_element(mesh, t);
  const auto op = edge_mismatch_operator(mesh, t);
  Eigen::Vector3d w;
  for (int k = 0; k < 3; ++k) w[k] = mesh.edge_length(mesh.triangle_edges(t)[k]) / mesh.diameter(t);
  return op.transpose() * w.asDiagonal() * op;
}

Mat2 p1_gradient(const Mesh2D& mesh, int t, const LocalVector& dofs) {
  const auto g = mesh.barycentric_gradients(t);
  Mat2 out = Mat2::Zero();
  for (int k = 0; k < 3; ++k) {
    out.row(0) += dofs[local_x(k)] * g.row(k);
    out.row(1) += dofs[local_y(k)] * g.row(k);
  }
  return out;
}

Eigen::Matrix<double, 1, kLocalDofs> curl_operator(const Mesh2D& mesh, int t) {
  const auto g = mesh.barycentric_gradients(t);
  Eigen::Matrix<double, 1, kLocalDofs> c = Eigen::Matrix<double, 1, kLocalDofs>::Zero();
  for (int k = 0; k < 3; ++k) {
    c(local_x(k)) = -g(k, 1);
    c(local_y(k)) = g(k, 0);
  }
  return c;
}

double triple_norm(const EGField& field, const Mesh2D& mesh) {
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const LocalVector d = gather_local(mesh, field, t);
    const Eigen::Vector4d g = modified_gradient_operator(mesh, t) * d;
    sum += mesh.area(t) * g.squaredNorm();
    const Eigen::Vector3d r = edge_mismatch_operator(mesh, t) * d;
    for (int k = 0; k < 3; ++k) {
      sum += mesh.edge_length(mesh.triangle_edges(t)[k]) / mesh.diameter(t) * r[k] * r[k];
    }
  }
  return std::sqrt(sum);
}

}  // namespace egns
