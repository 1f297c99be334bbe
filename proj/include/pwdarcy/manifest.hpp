#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pwdarcy/darcy.hpp"
#include "pwdarcy/gfield.hpp"
#include "pwdarcy/mapopt.hpp"

namespace pwdarcy {

/// Per-field prior spec as it appears in the manifest (truncation is derived
/// from the mesh in use, not stored).
struct FieldSpec {
  double mean = 0.0;
  double alpha = 1.4;
  double scale = 1.0;
};

struct McmcSpec {
  long samples = 100000;
  long burn_in = 20000;
  double beta = 0.05;
  double tau_scale = 0.02;  // RWM scale as a fraction of the support width
  long thin = 10;
};

/// The versioned experiment manifest. Defaults are exactly the experiment
/// values: 256^2 truth mesh, 64^2 inversion mesh, 25 observations with
/// epsilon = 0.05 and gamma = 0.01, sigma = exp, per-model field priors,
/// TOL = 1e-5, 1e5 samples with 2e4 burn-in.
struct Manifest {
  int version = 1;
  std::string model = "layer2";
  int layers_K = 0, layers_N = 0;  // multilayer only
  int truth_mesh = 256;
  int inversion_mesh = 64;
  std::vector<FieldSpec> fields;   // empty -> model defaults
  double f_value = 0.0;
  std::string g_kind = "x";        // "x" | "y" | "constant"
  double g_value = 4.0;            // head drop across the unit square
  std::string sigma = "exp";
  int obs_count = 25;
  double epsilon = 0.05;
  double gamma = 0.01;
  MapConfig map;
  int map_inits = 50;
  McmcSpec mcmc;
  std::uint64_t seed = 1;
  bool allow_inverse_crime = false;

  GeometryModel geometry() const;
  std::vector<FieldSpec> resolved_fields() const;  // defaults filled in
  std::vector<FieldPrior> field_priors(int mesh) const;
  PdeProblem pde_problem() const;
  ObservationSetup observation_setup() const;
  void validate() const;
};

/// Parse and validate a manifest; unknown keys are rejected by name, absent
/// keys take the defaults above.
Manifest load_manifest(const std::filesystem::path& path);
Manifest manifest_from_json_text(const std::string& text);
std::string manifest_to_json_text(const Manifest& m);
void save_manifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace pwdarcy
