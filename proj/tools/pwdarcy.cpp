#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pwdarcy/experiment.hpp"
#include "pwdarcy/io.hpp"

namespace fs = std::filesystem;
using namespace pwdarcy;

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inversion for piecewise-continuous Darcy permeability "
               "fields with geometric interfaces"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string manifest_path, out_dir, init_dir, model_override;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;

  app.add_option("--manifest", manifest_path, "experiment manifest (JSON)");
  app.add_option("--out", out_dir, "experiment output directory");
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed = s; seed_given = true; },
         "override the manifest root seed");
  app.add_option("--jobs", jobs, "parallel jobs where supported")->check(CLI::PositiveNumber);

  auto* cmd_generate = app.add_subcommand(
      "generate", "draw the truth from the prior, solve, observe, add noise");

  auto* cmd_map =
      app.add_subcommand("map", "run MAP searches from random initialisations");
  int inits = -1;
  cmd_map->add_option("--inits", inits, "number of initialisations");
  cmd_map->add_option("--model", model_override, "override the manifest model tag");

  auto* cmd_mcmc = app.add_subcommand("mcmc", "run one chain from a MAP result");
  long samples = -1, burnin = -1;
  cmd_mcmc->add_option("--init", init_dir, "MAP result directory (map/init_k)")
      ->required();
  cmd_mcmc->add_option("--samples", samples, "total sweeps");
  cmd_mcmc->add_option("--burnin", burnin, "sweeps discarded as burn-in");

  auto* cmd_analyze =
      app.add_subcommand("analyze", "minimizer/cluster/chain diagnostic reports");
  double threshold = 0.1;
  cmd_analyze->add_option("--threshold", threshold, "cluster distance threshold");

  auto* cmd_validate =
      app.add_subcommand("validate", "numerical validation suite (JSON report)");

  CLI11_PARSE(app, argc, argv);

  try {
    auto load = [&](bool prefer_out) {
      Manifest m = prefer_out && manifest_path.empty()
                       ? load_manifest(fs::path(out_dir) / "manifest.json")
                       : load_manifest(manifest_path);
      if (seed_given) m.seed = seed;
      return m;
    };

    if (cmd_generate->parsed()) {
      if (manifest_path.empty() || out_dir.empty())
        throw std::runtime_error("generate needs --manifest and --out");
      const Manifest m = load(false);
      const DataSet ds = generate(m);
      write_experiment(out_dir, m, ds);
      const ErrorStats stats = error_table(ds.rel_errors_percent);
      std::cout << "wrote " << out_dir << "  (rel. data error mean "
                << format_double(stats.mean_percent) << "%, range ["
                << format_double(stats.min_percent) << "%, "
                << format_double(stats.max_percent) << "%])\n";
      return 0;
    }
    if (cmd_map->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("map needs --out");
      Manifest m = load(true);
      if (!model_override.empty()) {
        m.model = model_override;
        m.fields.clear();
        m.validate();
      }
      const int n = inits > 0 ? inits : m.map_inits;
      const auto records = run_map(out_dir, m, n, jobs);
      int converged = 0;
      for (const auto& r : records) converged += r.converged ? 1 : 0;
      std::cout << "map: " << n << " runs, " << converged
                << " converged; see map/summary.csv\n";
      return 0;
    }
    if (cmd_mcmc->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("mcmc needs --out");
      const Manifest m = load(true);
      const long ns = samples > 0 ? samples : m.mcmc.samples;
      const long nb = burnin >= 0 ? burnin : m.mcmc.burn_in;
      fs::path init = init_dir;
      if (!fs::exists(init)) init = fs::path(out_dir) / init_dir;
      run_mcmc(out_dir, m, init, ns, nb);
      std::cout << "mcmc: " << ns << " sweeps from " << init << "\n";
      return 0;
    }
    if (cmd_analyze->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("analyze needs --out");
      const Manifest m = load(true);
      run_analyze(out_dir, m, threshold);
      std::cout << "analysis written to " << (fs::path(out_dir) / "analysis") << "\n";
      return 0;
    }
    if (cmd_validate->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("validate needs --out");
      Manifest m;
      if (!manifest_path.empty()) m = load(false);
      else if (fs::exists(fs::path(out_dir) / "manifest.json")) m = load(true);
      else if (seed_given) m.seed = seed;
      const bool ok = run_validate(out_dir, m);
      std::cout << "validation " << (ok ? "PASS" : "FAIL") << "; see "
                << (fs::path(out_dir) / "validate" / "report.json") << "\n";
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
