#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "asctk/dictionary.hpp"
#include "asctk/json_io.hpp"
#include "asctk/nnmx.hpp"
#include "asctk/omp.hpp"
#include "asctk/pipeline.hpp"
#include "asctk/rng.hpp"

using namespace asctk;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("asctk_cli_" + std::to_string(Rng(std::random_device{}()).raw()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ASCTK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

SceneDescription small_scene(int n_scatterers) {
  SceneDescription scene;
  scene.grid = make_default_grid(32, 32);
  const DiscretizationSpec spec = default_dictionary_spec(scene.grid, 8, 8, 2.0);
  Rng rng(99);
  for (int i = 0; i < n_scatterers; ++i) {
    AscParameterSet p;
    p.amplitude = 1.0 + rng.uniform();
    p.x_pos = spec.x_positions[rng.uniform_index(spec.x_positions.size())];
    p.y_pos = spec.y_positions[rng.uniform_index(spec.y_positions.size())];
    scene.scatterers.push_back(p);
  }
  return scene;
}

} // namespace

TEST_CASE("synth writes the same phase history as the library") {
  TempDir dir;
  const SceneDescription scene = small_scene(5);
  save_scene(dir.file("scene.json"), scene);
  REQUIRE(run_cli("synth " + dir.file("scene.json") + " --out " + dir.file("ph.nnmx")) == 0);
  const Eigen::MatrixXcd from_cli = read_nnmx_complex(dir.file("ph.nnmx"));
  const Eigen::MatrixXcd direct = synthesize_scene(scene.scatterers, scene.grid).data;
  CHECK(from_cli == direct);  // bit-exact against the direct API call
}

TEST_CASE("synth of an empty scene is the zero matrix") {
  TempDir dir;
  SceneDescription scene = small_scene(0);
  save_scene(dir.file("scene.json"), scene);
  REQUIRE(run_cli("synth " + dir.file("scene.json") + " --out " + dir.file("ph.nnmx")) == 0);
  CHECK(read_nnmx_complex(dir.file("ph.nnmx")).norm() == 0.0);
}

TEST_CASE("a duplicated scatterer doubles the synthesized entries") {
  TempDir dir;
  SceneDescription one = small_scene(1);
  save_scene(dir.file("one.json"), one);
  SceneDescription two = one;
  two.scatterers.push_back(two.scatterers[0]);
  save_scene(dir.file("two.json"), two);
  REQUIRE(run_cli("synth " + dir.file("one.json") + " --out " + dir.file("one.nnmx")) == 0);
  REQUIRE(run_cli("synth " + dir.file("two.json") + " --out " + dir.file("two.nnmx")) == 0);
  const Eigen::MatrixXcd a = read_nnmx_complex(dir.file("one.nnmx"));
  const Eigen::MatrixXcd b = read_nnmx_complex(dir.file("two.nnmx"));
  CHECK((b - 2.0 * a).norm() <= 1e-12 * b.norm());
}

TEST_CASE("malformed scene JSON exits with code 2") {
  TempDir dir;
  std::ofstream(dir.file("bad.json")) << "{ nope";
  CHECK(run_cli("synth " + dir.file("bad.json") + " --out " + dir.file("x.nnmx")) == 2);
  CHECK(run_cli("synth " + dir.file("missing.json") + " --out " + dir.file("x.nnmx")) == 2);
}

TEST_CASE("extract recovers a planted scene and reports a non-increasing trace") {
  TempDir dir;
  const SceneDescription scene = small_scene(3);
  save_scene(dir.file("scene.json"), scene);
  REQUIRE(run_cli("synth " + dir.file("scene.json") + " --out " + dir.file("ph.nnmx")) == 0);
  REQUIRE(run_cli("extract " + dir.file("ph.nnmx") + " --grid " + dir.file("scene.json") +
                  " --nx 8 --ny 8 --residual-tol 1e-6 --out " + dir.file("ascs.json")) == 0);
  const json j = read_json_file(dir.file("ascs.json"));
  CHECK(j.at("scatterers").size() == 3);
  const auto& trace = j.at("residual_trace");
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace[i].get<double>() <= trace[i - 1].get<double>() + 1e-12);

  // zero input gives an empty extraction
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(32, 32);
  write_nnmx_file(dir.file("zero.nnmx"), zero);
  REQUIRE(run_cli("extract " + dir.file("zero.nnmx") + " --grid " + dir.file("scene.json") +
                  " --nx 8 --ny 8 --out " + dir.file("z.json")) == 0);
  CHECK(read_json_file(dir.file("z.json")).at("scatterers").empty());
}

TEST_CASE("cluster in table mode groups point scatterers into one component") {
  TempDir dir;
  const SceneDescription scene = small_scene(4);
  save_scene(dir.file("scene.json"), scene);
  REQUIRE(run_cli("synth " + dir.file("scene.json") + " --out " + dir.file("ph.nnmx")) == 0);
  REQUIRE(run_cli("extract " + dir.file("ph.nnmx") + " --grid " + dir.file("scene.json") +
                  " --nx 8 --ny 8 --residual-tol 1e-6 --out " + dir.file("ascs.json")) == 0);
  REQUIRE(run_cli("cluster " + dir.file("ascs.json") + " --mode table --out " +
                  dir.file("ascc.json")) == 0);
  const json j = read_json_file(dir.file("ascc.json"));
  CHECK(j.at("mode") == "table");
  CHECK(j.at("k") == 1);  // all alpha=0, L=0 -> Sphere
  CHECK(fs::exists(dir.path / "component_Sphere.nnmx"));

  // kmeans mode requires a seed
  CHECK(run_cli("cluster " + dir.file("ascs.json") + " --mode kmeans --k-asc 2 --out " +
                dir.file("k.json")) == 2);
  CHECK(run_cli("cluster " + dir.file("ascs.json") +
                " --mode kmeans --k-asc 2 --seed 7 --out " + dir.file("k.json")) == 0);
  CHECK(read_json_file(dir.file("k.json")).at("k") == 2);
}

TEST_CASE("decompose emits factors and a report that matches the library") {
  TempDir dir;
  Rng rng(21);
  Eigen::MatrixXd x(16, 16);
  for (Eigen::Index j = 0; j < 16; ++j)
    for (Eigen::Index i = 0; i < 16; ++i) x(i, j) = rng.uniform();
  write_nnmx_file(dir.file("x.nnmx"), x);
  const Eigen::MatrixXd zero_comp = Eigen::MatrixXd::Zero(4, 4);
  write_nnmx_file(dir.file("c1.nnmx"), zero_comp);
  REQUIRE(run_cli("decompose " + dir.file("x.nnmx") + " " + dir.file("c1.nnmx") +
                  " --rank 4 --seed 3 --out " + dir.path.string()) == 0);
  const json j = read_json_file(dir.file("decomposition.json"));
  CHECK(j.at("rank") == 4);
  CHECK(j.at("layers").size() == 1);
  CHECK(j.at("telescoping_residual") == 0.0);

  // bit-exact agreement with the direct API call
  SolverConfig cfg;
  cfg.seed = 3;
  const NonNegMatrix nn = make_nonneg(x);
  const TriFactorLayer direct = onmtf_first_layer(nn, 4, cfg);
  CHECK(read_nnmx_real(dir.file("W1.nnmx")) == direct.w);
  CHECK(read_nnmx_real(dir.file("U1.nnmx")) == direct.u);
}

TEST_CASE("a non-converged decompose run exits with code 3") {
  TempDir dir;
  Rng rng(23);
  Eigen::MatrixXd x(16, 16);
  for (Eigen::Index j = 0; j < 16; ++j)
    for (Eigen::Index i = 0; i < 16; ++i) x(i, j) = rng.uniform();
  write_nnmx_file(dir.file("x.nnmx"), x);
  CHECK(run_cli("decompose " + dir.file("x.nnmx") +
                " --rank 4 --seed 3 --max-iters 1 --rel-tol 1e-12 --out " +
                dir.path.string()) == 3);
}

TEST_CASE("eval reports ssim 1 for identical files and matches the library") {
  TempDir dir;
  Rng rng(25);
  Eigen::MatrixXd a(24, 24), b(24, 24);
  for (Eigen::Index j = 0; j < 24; ++j)
    for (Eigen::Index i = 0; i < 24; ++i) {
      a(i, j) = rng.uniform();
      b(i, j) = rng.uniform();
    }
  write_nnmx_file(dir.file("a.nnmx"), a);
  write_nnmx_file(dir.file("b.nnmx"), b);
  REQUIRE(run_cli("eval --metric ssim " + dir.file("a.nnmx") + " " + dir.file("a.nnmx") +
                  " --out " + dir.file("self.json")) == 0);
  CHECK(read_json_file(dir.file("self.json")).at("value") == 1.0);

  REQUIRE(run_cli("eval --metric mse " + dir.file("a.nnmx") + " " + dir.file("b.nnmx") +
                  " --out " + dir.file("mse.json")) == 0);
  CHECK(read_json_file(dir.file("mse.json")).at("value").get<double>() ==
        doctest::Approx(mse(a, b)).epsilon(1e-15));

  CHECK(run_cli("eval --metric ssim " + dir.file("a.nnmx") + " " + dir.file("missing.nnmx")) ==
        2);
}

TEST_CASE("the pipeline runs end to end with deterministic digests") {
  TempDir dir;
  const SceneDescription scene = small_scene(6);
  save_scene(dir.file("scene.json"), scene);

  json cfg{{"seed", 11},
           {"k_asc", 3},
           {"rank", 8},
           {"mode", "kmeans"},
           {"scene_path", dir.file("scene.json")},
           {"dict", {{"nx", 8}, {"ny", 8}}},
           {"residual_tol", 1e-6},
           {"out_dir", dir.file("run1")}};
  std::ofstream(dir.file("cfg1.json")) << cfg.dump();
  cfg["out_dir"] = dir.file("run2");
  std::ofstream(dir.file("cfg2.json")) << cfg.dump();

  REQUIRE(run_cli("pipeline " + dir.file("cfg1.json") + " --out " + dir.file("r1.json")) == 0);
  REQUIRE(run_cli("pipeline " + dir.file("cfg2.json") + " --out " + dir.file("r2.json")) == 0);

  const json r1 = read_json_file(dir.file("r1.json"));
  const json r2 = read_json_file(dir.file("r2.json"));
  REQUIRE(r1.at("stages").size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r1.at("stages")[i].at("digest") == r2.at("stages")[i].at("digest"));
    CHECK(r1.at("stages")[i].at("name") == r2.at("stages")[i].at("name"));
  }
  CHECK(r1.at("ssim_reconstruction").get<double>() >= 0.95);
  CHECK(r1.at("telescoping_residual") == 0.0);
  CHECK(fs::exists(dir.path / "run1" / "ascc.json"));
  CHECK(fs::exists(dir.path / "run1" / "W1.nnmx"));
}
