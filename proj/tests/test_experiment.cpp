#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "pwdarcy/experiment.hpp"
#include "pwdarcy/io.hpp"

using namespace pwdarcy;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pwdarcy_exp_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Manifest small_manifest(const std::string& model = "layer2") {
  Manifest m;
  m.model = model;
  m.truth_mesh = 33;
  m.inversion_mesh = 17;
  m.seed = 11;
  m.validate();
  return m;
}

std::string read_file(const fs::path& p) { return read_text_file(p); }

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("empty manifest resolves to the experiment defaults") {
  const Manifest m = manifest_from_json_text("{}");
  CHECK(m.model == "layer2");
  CHECK(m.truth_mesh == 256);
  CHECK(m.inversion_mesh == 64);
  CHECK(m.gamma == 0.01);
  CHECK(m.epsilon == 0.05);
  CHECK(m.obs_count == 25);
  CHECK(m.map.tol == 1e-5);
  CHECK(m.mcmc.samples == 100000);
  CHECK(m.mcmc.burn_in == 20000);
  const auto fields = m.resolved_fields();
  REQUIRE(fields.size() == 2);
  CHECK(fields[0].mean == 1.0);
  CHECK(fields[0].alpha == 1.4);
  CHECK(fields[1].mean == -1.0);
  CHECK(fields[1].alpha == 1.8);
}

TEST_CASE("fault3 defaults carry the scaled covariances") {
  const Manifest m = manifest_from_json_text("{\"model\": \"fault3\"}");
  const auto fields = m.resolved_fields();
  REQUIRE(fields.size() == 3);
  CHECK(fields[0].mean == 2.0);
  CHECK(fields[0].scale == 2.0);
  CHECK(fields[1].mean == 0.0);
  CHECK(fields[2].mean == -2.0);
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(manifest_from_json_text("{\"foo\": 1}"),
                       doctest::Contains("foo"), std::runtime_error);
  CHECK_THROWS_WITH_AS(manifest_from_json_text("{\"map\": {\"bar\": 1}}"),
                       doctest::Contains("map.bar"), std::runtime_error);
}

TEST_CASE("manifest round-trips through its JSON echo") {
  const std::string text =
      "{\"model\": \"channel\", \"mesh\": {\"truth\": 65, \"inversion\": 33}, "
      "\"obs\": {\"gamma\": 0.02}, \"seed\": 9}";
  const Manifest m = manifest_from_json_text(text);
  const std::string echo = manifest_to_json_text(m);
  const Manifest m2 = manifest_from_json_text(echo);
  CHECK(manifest_to_json_text(m2) == echo);
  CHECK(m2.gamma == 0.02);
  CHECK(m2.model == "channel");
}

TEST_CASE("inverse crime guard") {
  Manifest m;
  m.truth_mesh = 64;
  m.inversion_mesh = 64;
  CHECK_THROWS(m.validate());
  m.allow_inverse_crime = true;
  m.validate();  // override allowed
}

TEST_CASE("generate is deterministic and respects gamma = 0") {
  Manifest m = small_manifest();
  const DataSet d1 = generate(m);
  const DataSet d2 = generate(m);
  CHECK((d1.y.array() == d2.y.array()).all());
  CHECK((d1.truth_a.array() == d2.truth_a.array()).all());
  CHECK(d1.y.size() == 25);
  const Eigen::VectorXd recomputed = d1.y_clean + d1.noise;
  CHECK((d1.y.array() == recomputed.array()).all());

  Manifest noiseless = m;
  noiseless.gamma = 0.0;
  const DataSet d3 = generate(noiseless);
  CHECK((d3.y.array() == d3.y_clean.array()).all());
  CHECK(d3.rel_errors_percent.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("changing the seed changes the truth") {
  Manifest m = small_manifest();
  const DataSet d1 = generate(m);
  m.seed = 12;
  const DataSet d2 = generate(m);
  CHECK((d1.y - d2.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("error table statistics and the division guard") {
  Eigen::VectorXd rel(3);
  rel << 0.0, 0.0, 0.0;
  const ErrorStats zero = error_table(rel);
  CHECK(zero.mean_percent == 0.0);
  CHECK(zero.min_percent == 0.0);
  CHECK(zero.max_percent == 0.0);

  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(error_table(one).mean_percent == 1.0);

  Eigen::VectorXd with_nan(3);
  with_nan << 1.0, std::numeric_limits<double>::quiet_NaN(), 3.0;
  const ErrorStats guarded = error_table(with_nan);
  CHECK(guarded.excluded == 1);
  CHECK(guarded.mean_percent == 2.0);
}

TEST_CASE("cluster minimizers by distance with best-I ordering") {
  const Grid grid(9);
  std::vector<Eigen::MatrixXd> lib;
  lib.push_back(Eigen::MatrixXd::Constant(9, 9, 0.0));
  lib.push_back(Eigen::MatrixXd::Constant(9, 9, 0.01));
  lib.push_back(Eigen::MatrixXd::Constant(9, 9, 1.0));
  SUBCASE("identical entries collapse to one class") {
    const auto labels = cluster_minimizers({lib[0], lib[0]}, {1.0, 2.0}, 0.1, grid);
    CHECK(labels == std::vector<int>{1, 1});
  }
  SUBCASE("distant entries split; class 1 holds the best I") {
    const auto labels = cluster_minimizers(lib, {5.0, 4.0, 1.0}, 0.1, grid);
    CHECK(labels == std::vector<int>{2, 2, 1});
  }
}

TEST_CASE("spectral field and state files round-trip") {
  const fs::path dir = fresh_dir("fields");
  Rng rng(71);
  FieldPrior prior;
  prior.truncation = 5;
  const SpectralField f = sample(prior, rng);
  save_spectral_field(dir, "field_1", f, prior.alpha, prior.scale);
  const SpectralField back = load_spectral_field(dir, "field_1");
  CHECK(back.mean == f.mean);
  CHECK((back.coeffs.array() == f.coeffs.array()).all());

  const Eigen::VectorXd a(Eigen::Vector2d(0.25, 0.75));
  save_state_bin(dir / "state.bin", {f, f}, a);
  std::vector<SpectralField> fields_back;
  Eigen::VectorXd a_back;
  load_state_bin(dir / "state.bin", fields_back, a_back);
  REQUIRE(fields_back.size() == 2);
  CHECK((a_back.array() == a.array()).all());
  CHECK((fields_back[1].coeffs.array() == f.coeffs.array()).all());
}

TEST_CASE("experiment trees are byte-identical across reruns") {
  const Manifest m = small_manifest();
  const DataSet ds = generate(m);
  const fs::path d1 = fresh_dir("tree_a");
  const fs::path d2 = fresh_dir("tree_b");
  write_experiment(d1, m, ds);
  write_experiment(d2, m, generate(m));
  for (const auto& entry : fs::recursive_directory_iterator(d1)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), d1);
    CHECK(read_file(entry.path()) == read_file(d2 / rel));
  }
  CHECK((load_observations(d1).array() == ds.y.array()).all());
}

TEST_CASE("map then mcmc then analyze produce the full output tree") {
  Manifest m = small_manifest();
  m.map.max_outer = 4;
  m.map.nm.max_iter = 60;
  m.mcmc.thin = 20;
  const fs::path dir = fresh_dir("pipeline");
  write_experiment(dir, m, generate(m));

  const auto records = run_map(dir, m, 2, 2);
  CHECK(records.size() == 2);
  CHECK(fs::exists(dir / "map" / "init_1" / "result.json"));
  CHECK(fs::exists(dir / "map" / "init_2" / "trace.csv"));
  CHECK(fs::exists(dir / "map" / "summary.csv"));

  run_mcmc(dir, m, dir / "map" / "init_1", 60, 20);
  const fs::path chain = dir / "mcmc" / "chain_1";
  CHECK(fs::exists(chain / "phi_trace.csv"));
  CHECK(fs::exists(chain / "mn_trace.csv"));
  CHECK(fs::exists(chain / "acceptance.json"));
  CHECK(fs::exists(chain / "conditional_mean.csv"));
  CHECK(fs::exists(chain / "states" / "state_00000020.bin"));

  // phi trace starts exactly at the minimizer's potential
  {
    std::ifstream in(chain / "phi_trace.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    const double phi0 = std::stod(first.substr(first.find(',') + 1));
    const double phi_map = [&] {
      const std::string text = read_file(dir / "map" / "init_1" / "result.json");
      const auto pos = text.find("\"phi\":");
      return std::stod(text.substr(pos + 6));
    }();
    CHECK(phi0 == doctest::Approx(phi_map).epsilon(1e-12));
  }

  run_analyze(dir, m);
  CHECK(fs::exists(dir / "analysis" / "minimizers.csv"));
  CHECK(fs::exists(dir / "analysis" / "classes.csv"));
  CHECK(fs::exists(dir / "analysis" / "chains.csv"));
  CHECK(fs::exists(dir / "analysis" / "dwell.csv"));
  CHECK(fs::exists(dir / "analysis" / "phi_trace_chain_1.dat"));
}

TEST_CASE("parallel map runs match the serial ones byte for byte") {
  Manifest m = small_manifest();
  m.map.max_outer = 3;
  m.map.nm.max_iter = 40;
  const fs::path serial = fresh_dir("serial");
  const fs::path parallel = fresh_dir("parallel");
  write_experiment(serial, m, generate(m));
  write_experiment(parallel, m, generate(m));
  run_map(serial, m, 3, 1);
  run_map(parallel, m, 3, 3);
  for (const auto& entry : fs::recursive_directory_iterator(serial / "map")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), serial / "map");
    CHECK(read_file(entry.path()) == read_file(parallel / "map" / rel));
  }
}

TEST_CASE("all randomness flows through labeled streams") {
  // audit: no direct standard-library RNG use anywhere in the library or CLI
  const fs::path root = fs::path(PWDARCY_SOURCE_DIR);
  const std::regex forbidden(
      "std::mt19937|std::random_device|std::normal_distribution|"
      "std::uniform_real_distribution|\\bsrand\\b|\\bdrand48\\b|\\brand\\(");
  const std::regex raw_rng_ctor("\\bRng\\s*\\(");
  for (const auto& sub : {"src", "include", "tools"}) {
    for (const auto& entry : fs::recursive_directory_iterator(root / sub)) {
      if (!entry.is_regular_file()) continue;
      const std::string text = read_file(entry.path());
      CHECK_MESSAGE(!std::regex_search(text, forbidden),
                    "forbidden RNG primitive in ", entry.path().string());
      const std::string name = entry.path().filename().string();
      if (name != "rng.hpp" && name != "rng.cpp")
        CHECK_MESSAGE(!std::regex_search(text, raw_rng_ctor),
                      "raw Rng construction outside seeded_rng in ",
                      entry.path().string());
    }
  }
}

TEST_CASE("validation suite passes end to end") {
  Manifest m = small_manifest();
  const fs::path dir = fresh_dir("validate");
  CHECK(run_validate(dir, m));
  CHECK(fs::exists(dir / "validate" / "report.json"));
}

}  // TEST_SUITE
