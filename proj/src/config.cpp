#include "egns/config.hpp"

#include "egns/quadrature.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace egns {

namespace pt = boost::property_tree;

double RunConfig::viscosity() const {
  if (!re) return nu;
  return re_convention == "cylinder" ? 1.0 / (10.0 * *re) : 1.0 / *re;
}

std::vector<double> RunConfig::schedule(double nu_target) const {
  if (continuation == "off") return {};
  if (continuation == "auto") return default_continuation(nu_target);
  return continuation_list;
}

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"name"}},
      {"mesh", {"generator", "n", "levels", "h", "path"}},
      {"physics", {"nu", "re", "re_convention", "continuation", "ra", "force_scale"}},
      {"boundary", {"wall_tags", "inlet_tags", "outlet_tags", "inlet_profile", "inlet_speed"}},
      {"newton", {"rel_tol", "max_iter"}},
      {"quadrature", {"load_degree", "convection_degree", "error_degree", "neumann_points"}},
      {"assembly", {"threads"}},
      {"output", {"dir", "vtk"}},
      {"noflow", {"threshold"}},
  };
  return keys;
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  std::string rest;
  if (in.fail() || (in >> rest)) throw ConfigError("invalid value for " + key + ": '" + text + "'");
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<T> out;
  std::string item;
  while (in >> item) out.push_back(parse_value<T>(key, item));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (!body.data().empty()) throw ConfigError("key outside any section: " + section);
    if (it == allowed_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown config key " + section + "." + key);
    }
  }
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };

  RunConfig c;
  if (auto v = get("experiment.name")) c.experiment = *v;
  if (auto v = get("mesh.generator")) c.mesh.generator = *v;
  if (auto v = get("mesh.n")) c.mesh.n = parse_value<int>("mesh.n", *v);
  if (auto v = get("mesh.levels")) c.mesh.levels = parse_list<int>("mesh.levels", *v);
  if (auto v = get("mesh.h")) c.mesh.h = parse_value<double>("mesh.h", *v);
  if (auto v = get("mesh.path")) {
    c.mesh.path = *v;
    if (c.mesh.path.is_relative() && !base_dir.empty()) c.mesh.path = base_dir / c.mesh.path;
  }
  if (auto v = get("physics.nu")) c.nu = parse_value<double>("physics.nu", *v);
  if (auto v = get("physics.re")) c.re = parse_value<double>("physics.re", *v);
  if (auto v = get("physics.re_convention")) c.re_convention = *v;
  if (auto v = get("physics.continuation")) {
    if (*v == "auto" || *v == "off") {
      c.continuation = *v;
    } else {
      c.continuation = "list";
      c.continuation_list = parse_list<double>("physics.continuation", *v);
    }
  }
  if (auto v = get("physics.ra")) c.ra = parse_value<double>("physics.ra", *v);
  if (auto v = get("physics.force_scale")) c.force_scale = parse_value<double>("physics.force_scale", *v);
  if (auto v = get("boundary.wall_tags")) c.wall_tags = parse_list<int>("boundary.wall_tags", *v);
  if (auto v = get("boundary.inlet_tags")) c.inlet_tags = parse_list<int>("boundary.inlet_tags", *v);
  if (auto v = get("boundary.outlet_tags")) c.outlet_tags = parse_list<int>("boundary.outlet_tags", *v);
  if (auto v = get("boundary.inlet_profile")) c.inlet_profile = *v;
  if (auto v = get("boundary.inlet_speed")) c.inlet_speed = parse_value<double>("boundary.inlet_speed", *v);
  if (auto v = get("newton.rel_tol")) c.newton.rel_tol = parse_value<double>("newton.rel_tol", *v);
  if (auto v = get("newton.max_iter")) c.newton.max_iter = parse_value<int>("newton.max_iter", *v);
  if (auto v = get("quadrature.load_degree")) c.assembly.load_degree = parse_value<int>("quadrature.load_degree", *v);
  if (auto v = get("quadrature.convection_degree")) {
    c.assembly.convection_degree = parse_value<int>("quadrature.convection_degree", *v);
  }
  if (auto v = get("quadrature.neumann_points")) {
    c.assembly.neumann_points = parse_value<int>("quadrature.neumann_points", *v);
  }
  if (auto v = get("quadrature.error_degree")) c.error_degree = parse_value<int>("quadrature.error_degree", *v);
  if (auto v = get("assembly.threads")) {
    c.assembly.threads = parse_value<int>("assembly.threads", *v);
    c.threads_set = true;
  }
  if (auto v = get("output.dir")) c.out_dir = *v;
  if (auto v = get("output.vtk")) c.vtk = parse_bool("output.vtk", *v);
  if (auto v = get("noflow.threshold")) c.noflow_threshold = parse_value<double>("noflow.threshold", *v);

  const std::set<std::string> generators{"rect", "step", "file"};
  require(generators.count(c.mesh.generator) > 0, "mesh.generator must be rect, step or file");
  require(c.mesh.n >= 1, "mesh.n must be at least 1");
  for (std::size_t i = 0; i < c.mesh.levels.size(); ++i) {
    require(c.mesh.levels[i] >= 1, "mesh.levels entries must be at least 1");
    require(i == 0 || c.mesh.levels[i] > c.mesh.levels[i - 1], "mesh.levels must be increasing");
  }
  require(c.mesh.h > 0.0, "mesh.h must be positive");
  require(c.mesh.generator != "file" || !c.mesh.path.empty(), "mesh.path is required for generator = file");
  require(c.nu > 0.0, "physics.nu must be positive");
  require(!c.re || *c.re > 0.0, "physics.re must be positive");
  require(c.re_convention == "step" || c.re_convention == "cylinder",
          "physics.re_convention must be step or cylinder");
  require(c.inlet_profile == "parabolic" || c.inlet_profile == "constant",
          "boundary.inlet_profile must be parabolic or constant");
  require(c.ra >= 0.0, "physics.ra must be nonnegative");
  auto degree_ok = [](int d) { return d >= 1 && d <= kMaxQuadratureDegree; };
  require(degree_ok(c.assembly.load_degree), "quadrature.load_degree must be in 1..10");
  require(degree_ok(c.assembly.convection_degree), "quadrature.convection_degree must be in 1..10");
  require(degree_ok(c.error_degree), "quadrature.error_degree must be in 1..10");
  require(c.assembly.neumann_points >= 1 && c.assembly.neumann_points <= 10,
          "quadrature.neumann_points must be in 1..10");
  require(c.assembly.threads >= 1, "assembly.threads must be at least 1");
  c.newton.validate();
  NewtonConfig schedule_check;
  schedule_check.continuation = c.continuation_list;
  schedule_check.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

}  // namespace egns
