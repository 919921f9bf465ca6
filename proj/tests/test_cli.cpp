#include "doctest.h"

#include "egns/config.hpp"
#include "egns/experiments.hpp"
#include "egns/vtk.hpp"
#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace egns;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("egns_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI with stdout and stderr captured in `log`; returns the exit code.
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(EGNS_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("defaults and a full config") {
  const RunConfig d = parse("");
  CHECK(d.mesh.generator == "rect");
  CHECK(d.viscosity() == 1.0);
  const RunConfig c = parse(
      "[experiment]\nname = converge\n"
      "[mesh]\ngenerator = rect\nlevels = 4 8 16\n"
      "[physics]\nnu = 1e-5\ncontinuation = auto\n"
      "[newton]\nrel_tol = 1e-9\nmax_iter = 40\n"
      "[quadrature]\nload_degree = 8\nerror_degree = 9\n"
      "[assembly]\nthreads = 2\n"
      "[output]\ndir = results\nvtk = false\n");
  CHECK(c.experiment == "converge");
  CHECK(c.mesh.levels == std::vector<int>{4, 8, 16});
  CHECK(c.nu == 1e-5);
  CHECK(c.newton.rel_tol == 1e-9);
  CHECK(c.newton.max_iter == 40);
  CHECK(c.assembly.load_degree == 8);
  CHECK(c.error_degree == 9);
  CHECK(c.assembly.threads == 2);
  CHECK(c.threads_set);
  CHECK_FALSE(c.vtk);
  CHECK(c.schedule(1e-5) == default_continuation(1e-5));
  CHECK(parse("[physics]\ncontinuation = off\n").schedule(1e-5).empty());
  CHECK(parse("[physics]\ncontinuation = 1e-2 1e-3\n").schedule(1e-3) == std::vector<double>{1e-2, 1e-3});
}

TEST_CASE("config rejections") {
  CHECK_THROWS_AS(parse("[mesh]\nsize = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[meshes]\nn = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[mesh]\nn = three\n"), ConfigError);
  CHECK_THROWS_AS(parse("[mesh]\nn = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[mesh]\nlevels = 8 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("[mesh]\ngenerator = file\n"), ConfigError);
  CHECK_THROWS_AS(parse("[physics]\nnu = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[physics]\nre_convention = pipe\n"), ConfigError);
  CHECK_THROWS_AS(parse("[physics]\ncontinuation = 1e-3 1e-2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[quadrature]\nload_degree = 11\n"), ConfigError);
  CHECK_THROWS_AS(parse("[output]\nvtk = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse("[newton]\nmax_iter = 0\n"), ConfigError);
  try {
    parse("[mesh]\nsize = 3\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mesh.size") != std::string::npos);
  }
}

TEST_CASE("Reynolds number conventions") {
  CHECK(parse("[physics]\nre = 100\n").viscosity() == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(parse("[physics]\nre = 5\nre_convention = cylinder\n").viscosity() == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(parse("[physics]\nnu = 0.3\n").viscosity() == 0.3);
}

TEST_CASE("relative mesh paths resolve against the config directory") {
  const RunConfig c = parse("[mesh]\ngenerator = file\npath = meshes/a.msh\n", "/data/run");
  CHECK(c.mesh.path == fs::path("/data/run/meshes/a.msh"));
  const RunConfig a = parse("[mesh]\ngenerator = file\npath = /abs/a.msh\n", "/data/run");
  CHECK(a.mesh.path == fs::path("/abs/a.msh"));
}

TEST_CASE("VTK output of a zero state") {
  const Mesh2D m = build_rect_uniform(1, 1);
  std::ostringstream out;
  write_vtk(m, FlowState::zeros(m), out);
  const std::string s = out.str();
  CHECK(s.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(s.find("POINTS 4 double") != std::string::npos);
  CHECK(s.find("CELLS 2 8") != std::string::npos);
  CHECK(s.find("CELL_TYPES 2") != std::string::npos);
  CHECK(s.find("POINT_DATA 4") != std::string::npos);
  CHECK(s.find("CELL_DATA 2") != std::string::npos);
  for (const char* name : {"u0", "p", "p_kin", "div_m", "curl", "Rv"}) {
    CHECK(s.find(std::string(" ") + name + " double") != std::string::npos);
  }
}

TEST_CASE("VTK divergence of a converged cavity is at round-off") {
  const Mesh2D m = build_rect_uniform(6, 6);
  const CavityResult r = run_cavity(6, 1.0, 0.0);
  std::ostringstream a, b;
  write_vtk(m, r.zero_force, a);
  write_vtk(m, r.zero_force, b);
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string line;
  while (std::getline(in, line) && line != "SCALARS div_m double 1") {
  }
  std::getline(in, line);  // LOOKUP_TABLE
  double worst = 0.0, v = 0.0;
  for (int t = 0; t < m.num_triangles() && (in >> v); ++t) worst = std::max(worst, std::abs(v));
  CHECK(worst < 1e-10);
}

TEST_CASE("step inlet profiles") {
  const VectorField p = parabolic_inlet(0.5, 1.0, 1.0);
  CHECK(p(Vec2(0, 0.75)).x() == doctest::Approx(1.5));
  CHECK(p(Vec2(0, 0.5)).x() == doctest::Approx(0.0).scale(1.0));
  // Mean speed over the inlet by Simpson (exact for the quadratic).
  const double mean = test::simpson_edge_average([&](const Vec2& x) { return p(x).x(); }, Vec2(0, 0.5), Vec2(0, 1));
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p(Vec2(0, 0.7)).y() == 0.0);
}

TEST_CASE("CLI exit codes and outputs") {
  const fs::path dir = scratch_dir("cli");
  const fs::path log = dir / "log.txt";

  CHECK(run_cli("noflow --config " + (dir / "missing.ini").string(), log) == 2);
  CHECK(read_file(log).find("config error") != std::string::npos);

  write_file(dir / "bad.ini", "[mesh]\nsize = 4\n");
  CHECK(run_cli("noflow --config " + (dir / "bad.ini").string(), log) == 2);
  CHECK(read_file(log).find("mesh.size") != std::string::npos);

  CHECK(run_cli("bogus", log) == 2);

  write_file(dir / "noflow.ini",
             "[experiment]\nname = noflow\n[mesh]\nn = 4\n[output]\ndir = " + (dir / "out_noflow").string() + "\n");
  CHECK(run_cli("noflow --config " + (dir / "noflow.ini").string(), log) == 0);
  CHECK(read_file(log).find("PASS") != std::string::npos);
  CHECK(fs::exists(dir / "out_noflow" / "noflow.vtk"));

  CHECK(run_cli("cavity --config " + (dir / "noflow.ini").string(), log) == 2);

  write_file(dir / "conv.ini",
             "[mesh]\nlevels = 2 4\n[physics]\nnu = 1e-3\ncontinuation = off\n"
             "[newton]\nmax_iter = 2\n[output]\nvtk = false\n");
  CHECK(run_cli("converge --config " + (dir / "conv.ini").string() + " --out " + (dir / "out_conv").string(), log) == 1);
  CHECK(read_file(log).find("failed") != std::string::npos);
  CHECK(fs::exists(dir / "out_conv" / "convergence.csv"));
  CHECK(fs::exists(dir / "out_conv" / "converge_newton.log"));

  write_file(dir / "conv_ok.ini", "[mesh]\nlevels = 2 4\n[output]\nvtk = false\n");
  CHECK(run_cli("converge --config " + (dir / "conv_ok.ini").string() + " --out " + (dir / "out_ok").string() +
                    " --serial",
                log) == 0);
  const std::string csv = read_file(dir / "out_ok" / "convergence.csv");
  CHECK(csv.rfind("h,e_l2,order,e_h1,order,e_p,order\n0.5,", 0) == 0);
  CHECK(csv.find("\n0.25,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("small viscosity without continuation fails at the first level") {
  const fs::path dir = scratch_dir("cold");
  write_file(dir / "cold.ini",
             "[mesh]\nlevels = 16 32\n[physics]\nnu = 1e-5\ncontinuation = off\n[output]\nvtk = false\n");
  CHECK(run_cli("converge --config " + (dir / "cold.ini").string() + " --out " + (dir / "out").string(), dir / "log.txt") == 1);
  const std::string log = read_file(dir / "log.txt");
  CHECK(log.find("level n = 16") != std::string::npos);
  CHECK(log.find("failed") != std::string::npos);
  CHECK(log.find("level n = 32") == std::string::npos);
  fs::remove_all(dir);
}
