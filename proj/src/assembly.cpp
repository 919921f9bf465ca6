#include "egns/assembly.hpp"

#include "egns/quadrature.hpp"
#include "egns/reconstruction.hpp"
#include "parallel.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace egns {

namespace {

using Triplet = Eigen::Triplet<double>;
using detail::Contributions;

// M_jl = int_T J phi_j . phi_l with J a = (-a2, a1). Antisymmetric.
Eigen::Matrix3d convection_kernel(const Mesh2D& mesh, int t, int degree) {
  const QuadratureRule& rule = quadrature_rule(degree);
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  const Triangle& tri = mesh.triangle(t);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::Vector3d& l = rule.points[q];
    const Vec2 x = l[0] * mesh.vertex(tri[0]) + l[1] * mesh.vertex(tri[1]) + l[2] * mesh.vertex(tri[2]);
    const auto phi = rt_basis(mesh, t, x);
    const double w = rule.weights[q] * mesh.area(t);
    for (int j = 0; j < 3; ++j) {
      const Vec2 jphi = rotate_ccw(phi[j]);
      for (int l2 = 0; l2 < 3; ++l2) m(j, l2) += w * jphi.dot(phi[l2]);
    }
  }
  return m;
}

bool contains(std::span<const int> set, int x) {
  return std::find(set.begin(), set.end(), x) != set.end();
}

void eliminate(SaddleSystem& s, const DirichletValues& dv, bool check_compatibility) {
  s.dof_map.constrained = dv.constrained;
  s.dof_map.constrained_value = dv.value;
  const Eigen::Map<const Eigen::VectorXd> uc(dv.value.data(), static_cast<Eigen::Index>(dv.value.size()));
  if (uc.lpNorm<Eigen::Infinity>() > 0.0) {
    s.rhs_u -= s.A * uc;
    s.rhs_p -= s.B * uc;
  }
  for (std::size_t i = 0; i < dv.constrained.size(); ++i) {
    if (dv.constrained[i]) s.rhs_u[static_cast<Eigen::Index>(i)] = dv.value[i];
  }
  if (check_compatibility && std::abs(dv.net_flux) > 1e-10 * dv.perimeter) {
    std::ostringstream msg;
    msg << "incompatible Dirichlet data: net boundary flux " << dv.net_flux
        << " exceeds 1e-10 * perimeter";
    s.warnings.push_back(msg.str());
  }
  s.constraints_applied = true;
}

}  // namespace

SparseMatrix assemble_a(const Mesh2D& mesh, double nu, const AssemblyOptions& options) {
  const DofMap dofs(mesh);
  Contributions c = detail::for_each_element(mesh.num_triangles(), options.threads, [&](int t, Contributions& out) {
    const GradientOperator g = modified_gradient_operator(mesh, t);
    const LocalMatrix local = nu * (mesh.area(t) * g.transpose() * g + stab_local(mesh, t));
    const auto d = dofs.local_dofs(mesh, t);
    for (int i = 0; i < kLocalDofs; ++i) {
      for (int j = 0; j < kLocalDofs; ++j) out.triplets.emplace_back(d[i], d[j], local(i, j));
    }
  });
  return detail::to_sparse(dofs.size(), dofs.size(), c.triplets);
}

SparseMatrix assemble_b(const Mesh2D& mesh) {
  const DofMap dofs(mesh);
  std::vector<Triplet> triplets;
  triplets.reserve(3 * static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    check_element(mesh, t);
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.triangle_edges(t)[k];
      triplets.emplace_back(t, dofs.edge_dof(e), mesh.edge_signs(t)[k] * mesh.edge_length(e));
    }
  }
  return detail::to_sparse(mesh.num_triangles(), dofs.size(), triplets);
}

SparseMatrix assemble_convection(const Mesh2D& mesh, const EGField& w, const AssemblyOptions& options) {
  if (!w.matches(mesh)) throw Error("assemble_convection: field does not match mesh");
  const DofMap dofs(mesh);
  Contributions c = detail::for_each_element(mesh.num_triangles(), options.threads, [&](int t, Contributions& out) {
    const double omega = curl_operator(mesh, t) * gather_local(mesh, w, t);
    const Eigen::Matrix3d m = convection_kernel(mesh, t, options.convection_degree);
    const auto d = dofs.local_dofs(mesh, t);
    for (int l = 0; l < 3; ++l) {
      for (int j = 0; j < 3; ++j) {
        out.triplets.emplace_back(d[local_edge(l)], d[local_edge(j)], omega * m(j, l));
      }
    }
  });
  return detail::to_sparse(dofs.size(), dofs.size(), c.triplets);
}

LinearizedTerm assemble_c_linearized(const Mesh2D& mesh, const EGField& u_n, const AssemblyOptions& options) {
  if (!u_n.matches(mesh)) throw Error("assemble_c_linearized: field does not match mesh");
  const DofMap dofs(mesh);
  Contributions c = detail::for_each_element(mesh.num_triangles(), options.threads, [&](int t, Contributions& out) {
    const LocalVector u = gather_local(mesh, u_n, t);
    const auto curl = curl_operator(mesh, t);
    const double omega = curl * u;
    const Eigen::Matrix3d m = convection_kernel(mesh, t, options.convection_degree);
    const Eigen::Vector3d mt_u = m.transpose() * u.tail<3>();
    const auto d = dofs.local_dofs(mesh, t);
    for (int l = 0; l < 3; ++l) {
      const int row = d[local_edge(l)];
      // c(u_n, z, v): z enters through R
      for (int j = 0; j < 3; ++j) out.triplets.emplace_back(row, d[local_edge(j)], omega * m(j, l));
      // c(z, u_n, v): z enters through its curl
      for (int k = 0; k < 6; ++k) out.triplets.emplace_back(row, d[k], curl(k) * mt_u[l]);
      out.entries.emplace_back(row, omega * mt_u[l]);
    }
  });
  LinearizedTerm term;
  term.matrix = detail::to_sparse(dofs.size(), dofs.size(), c.triplets);
  term.vector = detail::to_dense(dofs.size(), c.entries);
  return term;
}

double trilinear_form(const Mesh2D& mesh, const EGField& w, const EGField& z, const EGField& v) {
  const DofMap dofs(mesh);
  const SparseMatrix cw = assemble_convection(mesh, w);
  return dofs.to_vector(v).dot(cw * dofs.to_vector(z));
}

Eigen::VectorXd assemble_load(const Mesh2D& mesh, const VectorField& f, const AssemblyOptions& options) {
  const DofMap dofs(mesh);
  if (!f) return Eigen::VectorXd::Zero(dofs.size());
  const QuadratureRule& rule = quadrature_rule(options.load_degree);
  Contributions c = detail::for_each_element(mesh.num_triangles(), options.threads, [&](int t, Contributions& out) {
    const Triangle& tri = mesh.triangle(t);
    Eigen::Vector3d local = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& l = rule.points[q];
      const Vec2 x = l[0] * mesh.vertex(tri[0]) + l[1] * mesh.vertex(tri[1]) + l[2] * mesh.vertex(tri[2]);
      const Vec2 fx = f(x);
      const auto phi = rt_basis(mesh, t, x);
      for (int k = 0; k < 3; ++k) local[k] += rule.weights[q] * fx.dot(phi[k]);
    }
    for (int k = 0; k < 3; ++k) {
      out.entries.emplace_back(dofs.edge_dof(mesh.triangle_edges(t)[k]), mesh.area(t) * local[k]);
    }
  });
  return detail::to_dense(dofs.size(), c.entries);
}

LinearizedTerm assemble_neumann(const Mesh2D& mesh, std::span<const int> neumann_tags,
                                const VectorField& u_N, const EGField& u_n,
                                const AssemblyOptions& options) {
  if (!u_n.matches(mesh)) throw Error("assemble_neumann: field does not match mesh");
  const DofMap dofs(mesh);
  const LineRule& rule = gauss_line(options.neumann_points);
  std::vector<Triplet> triplets;
  Eigen::VectorXd vec = Eigen::VectorXd::Zero(dofs.size());
  for (int e : mesh.boundary_edges_with_tags(neumann_tags)) {
    const int va = mesh.edge(e)[0];
    const int vb = mesh.edge(e)[1];
    const Vec2& a = mesh.vertex(va);
    const Vec2& b = mesh.vertex(vb);
    const Vec2& n = mesh.edge_normal(e);
    const Vec2 tan = rotate_ccw(n);
    const double len = mesh.edge_length(e);
    const Vec2& ua = u_n.vertex_values[va];
    const Vec2& ub = u_n.vertex_values[vb];
    const int row = dofs.edge_dof(e);
    // <u0^n . z0, v_b>: weights of z0(a) and z0(b) are int (u0^n lambda_a), int (u0^n lambda_b)
    Vec2 wa = Vec2::Zero(), wb = Vec2::Zero();
    double kinetic = 0.0;
    double normal_data = 0.0;
    double tangential_a = 0.0, tangential_b = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double s = rule.points[q];
      const double w = rule.weights[q] * len;
      const Vec2 u0 = (1.0 - s) * ua + s * ub;
      wa += w * (1.0 - s) * u0;
      wb += w * s * u0;
      kinetic += w * 0.5 * u0.squaredNorm();
      if (u_N) {
        const Vec2 g = u_N((1.0 - s) * a + s * b);
        normal_data += w * g.dot(n);
        tangential_a += w * (1.0 - s) * tan.dot(g);
        tangential_b += w * s * tan.dot(g);
      }
    }
    for (int c = 0; c < 2; ++c) {
      triplets.emplace_back(row, dofs.vertex_dof(va, c), wa[c]);
      triplets.emplace_back(row, dofs.vertex_dof(vb, c), wb[c]);
      // <n x u_N, n x v0> with n x v0 = tan . v0
      vec[dofs.vertex_dof(va, c)] += tangential_a * tan[c];
      vec[dofs.vertex_dof(vb, c)] += tangential_b * tan[c];
    }
    vec[row] += normal_data + kinetic;
  }
  LinearizedTerm term;
  term.matrix = detail::to_sparse(dofs.size(), dofs.size(), triplets);
  term.vector = std::move(vec);
  return term;
}

// ---- boundary conditions ----------------------------------------------------------

void BoundaryConditions::check(const Mesh2D& mesh) const {
  std::vector<int> dirichlet_tags;
  for (const DirichletPart& part : dirichlet) {
    if (!part.value) throw ConfigError("Dirichlet part without a boundary value");
    dirichlet_tags.insert(dirichlet_tags.end(), part.tags.begin(), part.tags.end());
  }
  for (int e : mesh.boundary_edges()) {
    const int tag = mesh.boundary_tag(e);
    const bool is_d = contains(dirichlet_tags, tag);
    const bool is_n = contains(neumann_tags, tag);
    if (is_d && is_n) {
      throw ConfigError("boundary tag " + std::to_string(tag) + " is both Dirichlet and Neumann");
    }
    if (!is_d && !is_n) {
      throw ConfigError("boundary edge " + std::to_string(e) + " (tag " + std::to_string(tag) +
                        ") has no boundary condition");
    }
  }
}

DirichletValues dirichlet_values(const Mesh2D& mesh, std::span<const DirichletPart> parts) {
  const DofMap dofs(mesh);
  DirichletValues dv;
  dv.constrained.assign(static_cast<std::size_t>(dofs.size()), 0);
  dv.value.assign(static_cast<std::size_t>(dofs.size()), 0.0);
  std::vector<int> vertex_priority(static_cast<std::size_t>(mesh.num_vertices()), 0);
  std::vector<int> edge_priority(static_cast<std::size_t>(mesh.num_edges()), 0);
  const LineRule& rule = gauss_line(2);

  auto set_vertex = [&](int v, const Vec2& value, int priority) {
    const int i = dofs.vertex_dof(v, 0);
    if (!dv.constrained[i]) {
      dv.constrained[i] = dv.constrained[i + 1] = 1;
      dv.value[i] = value.x();
      dv.value[i + 1] = value.y();
      vertex_priority[v] = priority;
      return;
    }
    const Vec2 old(dv.value[i], dv.value[i + 1]);
    if (old == value) return;
    std::ostringstream note;
    note << "vertex " << v << " at (" << mesh.vertex(v).x() << ", " << mesh.vertex(v).y()
         << "): conflicting Dirichlet values (" << old.x() << ", " << old.y() << ") and ("
         << value.x() << ", " << value.y() << "); ";
    if (priority > vertex_priority[v]) {
      dv.value[i] = value.x();
      dv.value[i + 1] = value.y();
      vertex_priority[v] = priority;
      note << "kept the second (higher priority)";
    } else {
      note << "kept the first";
    }
    dv.notes.push_back(note.str());
  };

  for (const DirichletPart& part : parts) {
    if (!part.value) throw ConfigError("Dirichlet part without a boundary value");
    for (int e : mesh.boundary_edges_with_tags(part.tags)) {
      const int i = dofs.edge_dof(e);
      if (dv.constrained[i] && part.priority <= edge_priority[e]) continue;
      const Vec2& a = mesh.vertex(mesh.edge(e)[0]);
      const Vec2& b = mesh.vertex(mesh.edge(e)[1]);
      double avg = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double s = rule.points[q];
        avg += rule.weights[q] * part.value((1.0 - s) * a + s * b).dot(mesh.edge_normal(e));
      }
      dv.constrained[i] = 1;
      dv.value[i] = avg;
      edge_priority[e] = part.priority;
      for (int v : mesh.edge(e)) set_vertex(v, part.value(mesh.vertex(v)), part.priority);
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int i = dofs.edge_dof(e);
    if (!dv.constrained[i]) continue;
    dv.net_flux += mesh.edge_length(e) * dv.value[i];
    dv.perimeter += mesh.edge_length(e);
  }
  return dv;
}

SaddleSystem apply_dirichlet(SaddleSystem system, const Mesh2D& mesh,
                             std::span<const DirichletPart> parts, bool check_compatibility) {
  const DirichletValues dv = dirichlet_values(mesh, parts);
  eliminate(system, dv, check_compatibility);
  return system;
}

SaddleSystem apply_dirichlet(SaddleSystem system, const Mesh2D& mesh, const VectorField& u_D,
                             std::span<const int> tags, bool check_compatibility) {
  const DirichletPart part{std::vector<int>(tags.begin(), tags.end()), u_D, 0};
  return apply_dirichlet(std::move(system), mesh, std::span<const DirichletPart>(&part, 1),
                         check_compatibility);
}

// ---- full system ------------------------------------------------------------------------

SystemAssembler::SystemAssembler(FlowProblem problem) : problem_(std::move(problem)) {
  if (problem_.mesh == nullptr) throw ConfigError("flow problem without a mesh");
  if (!(problem_.nu > 0.0)) throw ConfigError("viscosity must be positive");
  const Mesh2D& mesh = *problem_.mesh;
  problem_.bc.check(mesh);
  a_ = assemble_a(mesh, problem_.nu, problem_.options);
  b_ = assemble_b(mesh);
  load_ = assemble_load(mesh, problem_.force, problem_.options);
  dirichlet_ = dirichlet_values(mesh, problem_.bc.dirichlet);
}

SaddleSystem SystemAssembler::assemble(const EGField& u_n) const {
  const Mesh2D& mesh = *problem_.mesh;
  SaddleSystem s;
  s.dof_map = DofMap(mesh);
  s.B = b_;
  s.rhs_p = Eigen::VectorXd::Zero(mesh.num_triangles());
  if (problem_.convection) {
    LinearizedTerm c = assemble_c_linearized(mesh, u_n, problem_.options);
    s.A = a_ + c.matrix;
    s.rhs_u = load_ + c.vector;
  } else {
    s.A = a_;
    s.rhs_u = load_;
  }
  const BoundaryConditions& bc = problem_.bc;
  if (!bc.neumann_tags.empty()) {
    const EGField lin = problem_.convection ? u_n : EGField::zeros(mesh);
    LinearizedTerm d = assemble_neumann(mesh, bc.neumann_tags, bc.neumann_data, lin, problem_.options);
    s.A += d.matrix;
    s.rhs_u += d.vector;
  }
  if (bc.pure_dirichlet()) {
    Eigen::VectorXd areas(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) areas[t] = mesh.area(t);
    s.mean_constraint = std::move(areas);
  }
  eliminate(s, dirichlet_, bc.pure_dirichlet());
  return s;
}

SaddleSystem assemble_system(const FlowProblem& problem, const EGField& u_n) {
  return SystemAssembler(problem).assemble(u_n);
}

void export_matrix_market(const SparseMatrix& m, const std::filesystem::path& path) {
  if (!Eigen::saveMarket(m, path.string())) {
    throw Error("cannot write matrix to " + path.string());
  }
}

}  // namespace egns
