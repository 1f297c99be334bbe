#pragma once

#include <functional>
#include <optional>
#include <vector>
#include <Eigen/Core>

#include "pwdarcy/posterior.hpp"

namespace pwdarcy {

struct McmcConfig {
  long n_samples = 100000;
  long burn_in = 20000;
  double beta = 0.05;      // pCN step, in [0, 1]
  Eigen::VectorXd tau;     // RWM scale per geometry parameter
  long thin = 10;          // state-storage stride (phi trace is never thinned)

  void validate() const;
  /// tau = frac * support width per parameter.
  static Eigen::VectorXd tau_from_width(const GeometricPrior& prior, double frac);
};

/// Full sampler state: spectral fields, geometry, the cached nodal
/// log-permeability u^a and its potential value.
struct ChainState {
  std::vector<SpectralField> fields;
  Eigen::VectorXd a;
  Eigen::MatrixXd u_a;
  double phi = 0.0;
};

struct StoredState {
  long iteration = 0;
  std::vector<SpectralField> fields;
  Eigen::VectorXd a;
};

struct ChainOutput {
  std::vector<double> phi_trace;          // initial state + one value per sweep
  std::vector<int> mn_trace;              // nearest minimizer per sweep (if library given)
  double accept_geometry = 0.0;
  Eigen::VectorXd accept_fields;          // per field
  std::vector<StoredState> states;        // thinned
  Eigen::MatrixXd conditional_mean;       // posterior mean of u^a, post burn-in
};

/// Potential evaluator Phi(u^a); the PDE-backed version comes from
/// ForwardModel::potential_fn, tests may pass arbitrary closures.
using PotentialFn = std::function<double(const Eigen::MatrixXd&)>;

/// pCN proposal v = m + sqrt(1-beta^2)(u - m) + beta xi, xi a fresh prior
/// fluctuation; coefficient-wise.
SpectralField pcn_propose(const SpectralField& field, const FieldPrior& prior,
                          double beta, Rng& rng);

/// Random-walk proposal a' = a + tau .* xi and the prior log-density
/// correction log rho(a') - log rho(a) (-inf when a' leaves the support).
struct RwmProposal {
  Eigen::VectorXd a;
  double log_density_correction = 0.0;
};
RwmProposal rwm_geometry(const Eigen::VectorXd& a, const GeometricPrior& prior,
                         const Eigen::VectorXd& tau, Rng& rng);

struct SweepCounters {
  long geometry_proposed = 0, geometry_accepted = 0;
  Eigen::VectorXd field_proposed, field_accepted;
};

/// One Metropolis-within-Gibbs sweep: an RWM geometry update, then one pCN
/// update per field in ascending region order. Each sub-update re-evaluates
/// Phi once (one forward solve for in-support proposals).
void gibbs_sweep(ChainState& state, const PotentialFn& potential,
                 const std::vector<FieldPrior>& priors, const GeometricPrior& geom_prior,
                 const GeometryModel& model, const Grid& grid, const McmcConfig& config,
                 Rng& rng, SweepCounters& counters);

/// Run a full chain; deterministic given the rng state. The minimizer
/// library, when given, enables the nearest-minimizer trace m_n.
ChainOutput run_chain(const ChainState& init, const PotentialFn& potential,
                      const std::vector<FieldPrior>& priors,
                      const GeometricPrior& geom_prior, const GeometryModel& model,
                      const Grid& grid, const McmcConfig& config, Rng& rng,
                      const std::vector<Eigen::MatrixXd>& minimizer_library = {});

/// Index (1-based) of the library entry nearest to u_a in the nodal L2
/// metric; ties go to the lowest index.
int nearest_minimizer(const Eigen::MatrixXd& u_a,
                      const std::vector<Eigen::MatrixXd>& library, const Grid& grid);

/// m_n for a sequence of stored states.
std::vector<int> nearest_minimizer_trace(const std::vector<StoredState>& states,
                                         const GeometryModel& model,
                                         const std::vector<Eigen::MatrixXd>& library,
                                         const Grid& grid);

/// Helper assembling a ChainState (synthesizes u^a and evaluates Phi once).
ChainState make_chain_state(const std::vector<SpectralField>& fields,
                            const Eigen::VectorXd& a, const GeometryModel& model,
                            const Grid& grid, const PotentialFn& potential);

}  // namespace pwdarcy
