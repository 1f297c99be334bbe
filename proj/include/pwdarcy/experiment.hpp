#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pwdarcy/manifest.hpp"
#include "pwdarcy/mcmc.hpp"
#include "pwdarcy/posterior.hpp"

namespace pwdarcy {

/// Truth draw, clean and noisy observations, and the per-observation
/// relative errors (percent; NaN where the clean datum is below 1e-12).
struct DataSet {
  Eigen::VectorXd y, y_clean, noise;
  Eigen::VectorXd rel_errors_percent;
  std::vector<SpectralField> truth_fields;  // truth-mesh truncation
  Eigen::VectorXd truth_a;
  Eigen::MatrixXd truth_ua;                 // nodal on the truth mesh
};

/// Samples the truth from the prior on the truth mesh, solves the forward
/// problem there, observes, and adds N(0, gamma^2) noise. Deterministic in
/// the manifest seed (streams "truth.fields.i", "truth.geom", "noise").
DataSet generate(const Manifest& manifest);

struct ErrorStats {
  double mean_percent = 0, min_percent = 0, max_percent = 0;
  int excluded = 0;  // observations with |y_clean| < 1e-12
};
ErrorStats error_table(const Eigen::VectorXd& rel_errors_percent);

/// Single-linkage clustering of minimizers by nodal L2 distance of u^a.
/// Returns one 1-based class label per entry; classes are numbered by their
/// best (lowest) I representative.
std::vector<int> cluster_minimizers(const std::vector<Eigen::MatrixXd>& ua_library,
                                    const std::vector<double>& om_totals,
                                    double threshold, const Grid& grid);

// --- persistence -----------------------------------------------------------

void save_spectral_field(const std::filesystem::path& dir, const std::string& name,
                         const SpectralField& field, double alpha, double scale);
SpectralField load_spectral_field(const std::filesystem::path& dir,
                                  const std::string& name);

void save_state_bin(const std::filesystem::path& path, const std::vector<SpectralField>& fields,
                    const Eigen::VectorXd& a);
void load_state_bin(const std::filesystem::path& path, std::vector<SpectralField>& fields,
                    Eigen::VectorXd& a);

/// Writes manifest.json (resolved echo), truth/, data.json and noise.json.
void write_experiment(const std::filesystem::path& dir, const Manifest& manifest,
                      const DataSet& data);

/// Reads the observation vector written by write_experiment.
Eigen::VectorXd load_observations(const std::filesystem::path& dir);

// --- orchestration (the CLI subcommands call straight into these) ----------

struct MapRunRecord {
  int init_id = 0;
  OmValue om;
  bool converged = false;
};

/// Runs `inits` MAP searches (streams "map.init.k"), writes map/init_k/ and
/// map/summary.csv under dir. Parallel over jobs; outputs are independent of
/// the schedule.
std::vector<MapRunRecord> run_map(const std::filesystem::path& dir,
                                  const Manifest& manifest, int inits, int jobs);

/// Loads one MAP result directory (fields + geometry).
void load_map_result(const std::filesystem::path& init_dir,
                     std::vector<SpectralField>& fields, Eigen::VectorXd& a);

/// Runs one chain initialised from a MAP result directory (stream
/// "mcmc.chain.k"), writes mcmc/chain_k/ under dir. The minimizer library for
/// the m_n trace is every map/init_*/ directory present under dir.
void run_mcmc(const std::filesystem::path& dir, const Manifest& manifest,
              const std::filesystem::path& init_dir, long samples, long burn_in);

/// Builds the analysis reports (minimizer table, classes, chain summaries,
/// dwell fractions, gnuplot traces) under dir/analysis.
void run_analyze(const std::filesystem::path& dir, const Manifest& manifest,
                 double cluster_threshold = 0.1);

/// Desk-scale numerical validation suite; writes report.json under
/// dir/validate and returns overall pass.
bool run_validate(const std::filesystem::path& dir, const Manifest& manifest);

}  // namespace pwdarcy
