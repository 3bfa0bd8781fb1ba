#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "sphap/mesh.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace sphap;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sphap_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    save_mesh(d / "ell.obj", make_icosphere(2, Vector3(1.0, 0.8, 0.6)));
    save_mesh(d / "ell2.off", make_icosphere(2, Vector3(1.0, 0.7, 0.9)));
    std::ofstream(d / "lm.txt") << "1 1\n2 2\n5 5\n7 7\n12 12\n";
    return d;
  }();
  return dir;
}

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const fs::path log = workdir() / "stdout.txt";
  const std::string cmd = "cd " + workdir().string() + " && " + env + " " SPHAP_CLI_PATH " " +
                          args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream s;
  s << in.rdbuf();
  return {WEXITSTATUS(status), s.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("param writes the sphere, log, vertex map and manifest") {
  const auto r = run("param ell.obj --fpi-iters 10 --max-iters 20 --ls interp --no-timing -o p1");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("SD/Mean") != std::string::npos);
  CHECK(r.out.find("folds 0") != std::string::npos);
  const auto sphere = load_mesh(workdir() / "p1.obj", MeshFormat::automatic, TopologyCheck::none);
  CHECK((sphere.vertices().rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(sphere.faces() == load_mesh(workdir() / "ell.obj").faces());
  const auto manifest = nlohmann::json::parse(slurp(workdir() / "p1.manifest.json"));
  CHECK(manifest["subcommand"] == "param");
  CHECK(manifest["parameters"]["max_iters"] == 20);
  const int fpi = manifest["result"]["fpi_rows"];
  const int rgd = manifest["result"]["rgd_iterations"];
  CHECK(rgd <= 20);
  CHECK(count_lines(slurp(workdir() / "p1.csv")) == 1 + fpi + rgd);
  CHECK(count_lines(slurp(workdir() / "p1.vid")) == 1 + sphere.num_vertices());
}

TEST_CASE("same parameters give a byte-identical log") {
  REQUIRE(run("param ell.obj --max-iters 15 --no-timing -o a").code == 0);
  REQUIRE(run("param ell.obj --max-iters 15 --no-timing -o b").code == 0);
  CHECK(slurp(workdir() / "a.csv") == slurp(workdir() / "b.csv"));
  CHECK(slurp(workdir() / "a.obj") == slurp(workdir() / "b.obj"));
}

TEST_CASE("flags map onto options and environment variables override defaults") {
  REQUIRE(run("param ell.obj --ls bounded --max-iters 3 --r 1.1 -o bnd").code == 0);
  auto m = nlohmann::json::parse(slurp(workdir() / "bnd.manifest.json"));
  CHECK(m["parameters"]["ls"] == "bounded");
  CHECK(m["parameters"]["r"] == 1.1);
  REQUIRE(run("param ell.obj -o env", "SPHAP_MAX_ITERS=4 SPHAP_SEED=9").code == 0);
  m = nlohmann::json::parse(slurp(workdir() / "env.manifest.json"));
  CHECK(m["parameters"]["max_iters"] == 4);
  CHECK(m["parameters"]["seed"] == 9);
  CHECK(run("param ell.obj --ls newton").code == 2);
  CHECK(run("param nothere.obj").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("register, then morph with K frames") {
  const auto r = run("register ell.obj ell2.off --landmarks lm.txt --max-iters 20 -o reg");
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(workdir() / "reg.mismatch.json"));
  CHECK(report["reduction"].get<double>() >= 0.9);
  const std::string records = slurp(workdir() / "reg.composed.txt");
  CHECK(count_lines(records) == 1 + make_icosphere(2).num_vertices());

  const auto m = run("morph ell.obj reg.composed.obj --frames 4 -o mo");
  REQUIRE(m.code == 0);
  for (int k = 0; k < 4; ++k) CHECK(fs::exists(workdir() / ("mo_00" + std::to_string(k) + ".obj")));
  const auto f0 = load_mesh(workdir() / "mo_000.obj");
  CHECK(f0.vertices() == load_mesh(workdir() / "ell.obj").vertices());
  const auto f3 = load_mesh(workdir() / "mo_003.obj", MeshFormat::automatic, TopologyCheck::none);
  CHECK(f3.vertices() ==
        load_mesh(workdir() / "reg.composed.obj", MeshFormat::automatic, TopologyCheck::none)
            .vertices());
  CHECK(run("morph ell.obj reg.composed.obj --frames 1").code == 2);
}

TEST_CASE("missing landmark file is a usage error") {
  const auto r = run("register ell.obj ell2.off --landmarks missing.txt");
  CHECK(r.code == 2);
  CHECK(r.out.find("missing.txt") != std::string::npos);
}

TEST_CASE("check passes on an icosphere and flags a flipped face") {
  auto r = run("check ell.obj --probe-eigen");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS eigen_probe") != std::string::npos);

  const auto mesh = make_icosphere(2);
  FaceMatrix F = mesh.faces();
  std::swap(F(0, 1), F(0, 2));
  save_mesh(workdir() / "flipped.obj", mesh.vertices(), F);
  r = run("check flipped.obj");
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL folds: 1 folded") != std::string::npos);
}
