#include "pwdarcy/mcmc.hpp"

#include <cmath>
#include <stdexcept>

namespace pwdarcy {

void McmcConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("McmcConfig: beta must lie in [0, 1]");
  if ((tau.array() <= 0.0).any())
    throw std::invalid_argument("McmcConfig: tau must be positive");
  if (burn_in >= n_samples)
    throw std::invalid_argument("McmcConfig: burn_in must be below n_samples");
  if (thin < 1) throw std::invalid_argument("McmcConfig: thin must be >= 1");
}

Eigen::VectorXd McmcConfig::tau_from_width(const GeometricPrior& prior, double frac) {
  return frac * prior.width();
}

SpectralField pcn_propose(const SpectralField& field, const FieldPrior& prior,
                          double beta, Rng& rng) {
  const SpectralField xi = sample(prior, rng);
  SpectralField out;
  out.mean = field.mean;
  out.coeffs = std::sqrt(1.0 - beta * beta) * field.coeffs + beta * xi.coeffs;
  return out;
}

RwmProposal rwm_geometry(const Eigen::VectorXd& a, const GeometricPrior& prior,
                         const Eigen::VectorXd& tau, Rng& rng) {
  RwmProposal prop;
  prop.a = a + tau.cwiseProduct(rng.normal_vector(a.size()));
  const double ld_new = prior.log_density(prop.a);
  const double ld_old = prior.log_density(a);
  prop.log_density_correction = ld_new - ld_old;
  return prop;
}

void gibbs_sweep(ChainState& state, const PotentialFn& potential,
                 const std::vector<FieldPrior>& priors, const GeometricPrior& geom_prior,
                 const GeometryModel& model, const Grid& grid, const McmcConfig& config,
                 Rng& rng, SweepCounters& counters) {
  // geometry block: RWM with the prior density ratio in the acceptance
  {
    const RwmProposal prop = rwm_geometry(state.a, geom_prior, config.tau, rng);
    ++counters.geometry_proposed;
    const double u = rng.uniform01();
    if (std::isfinite(prop.log_density_correction)) {
      const Eigen::MatrixXd u_a_prop =
          construct(state.fields, model, prop.a, grid).values;
      const double phi_prop = potential(u_a_prop);
      const double log_alpha = (state.phi - phi_prop) + prop.log_density_correction;
      if (std::log(u) < log_alpha) {
        state.a = prop.a;
        state.u_a = u_a_prop;
        state.phi = phi_prop;
        ++counters.geometry_accepted;
      }
    }
  }
  // field blocks: pCN, acceptance from Phi differences only
  for (int i = 0; i < static_cast<int>(state.fields.size()); ++i) {
    const SpectralField prop = pcn_propose(state.fields[i], priors[i], config.beta, rng);
    ++counters.field_proposed[i];
    std::vector<SpectralField> fields_prop = state.fields;
    fields_prop[i] = prop;
    const Eigen::MatrixXd u_a_prop = construct(fields_prop, model, state.a, grid).values;
    const double phi_prop = potential(u_a_prop);
    const double alpha = accept_ratio_fields(state.phi, phi_prop);
    if (rng.uniform01() < alpha) {
      state.fields[i] = fields_prop[i];
      state.u_a = u_a_prop;
      state.phi = phi_prop;
      ++counters.field_accepted[i];
    }
  }
}

ChainState make_chain_state(const std::vector<SpectralField>& fields,
                            const Eigen::VectorXd& a, const GeometryModel& model,
                            const Grid& grid, const PotentialFn& potential) {
  ChainState state;
  state.fields = fields;
  state.a = a;
  state.u_a = construct(fields, model, a, grid).values;
  state.phi = potential(state.u_a);
  return state;
}

int nearest_minimizer(const Eigen::MatrixXd& u_a,
                      const std::vector<Eigen::MatrixXd>& library, const Grid& grid) {
  if (library.empty()) throw std::invalid_argument("nearest_minimizer: empty library");
  int best = 1;
  double best_dist = l2_norm(grid, u_a - library[0]);
  for (int i = 1; i < static_cast<int>(library.size()); ++i) {
    const double dist = l2_norm(grid, u_a - library[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = i + 1;
    }
  }
  return best;
}

std::vector<int> nearest_minimizer_trace(const std::vector<StoredState>& states,
                                         const GeometryModel& model,
                                         const std::vector<Eigen::MatrixXd>& library,
                                         const Grid& grid) {
  std::vector<int> mn;
  mn.reserve(states.size());
  for (const auto& s : states) {
    const Eigen::MatrixXd u_a = construct(s.fields, model, s.a, grid).values;
    mn.push_back(nearest_minimizer(u_a, library, grid));
  }
  return mn;
}

ChainOutput run_chain(const ChainState& init, const PotentialFn& potential,
                      const std::vector<FieldPrior>& priors,
                      const GeometricPrior& geom_prior, const GeometryModel& model,
                      const Grid& grid, const McmcConfig& config, Rng& rng,
                      const std::vector<Eigen::MatrixXd>& minimizer_library) {
  config.validate();
  if (!geom_prior.contains(init.a))
    throw std::invalid_argument("run_chain: initial geometry outside the support");

  ChainState state = init;
  ChainOutput out;
  out.phi_trace.reserve(config.n_samples + 1);
  out.phi_trace.push_back(state.phi);
  out.accept_fields = Eigen::VectorXd::Zero(state.fields.size());
  out.conditional_mean = Eigen::MatrixXd::Zero(grid.n, grid.n);

  SweepCounters counters;
  counters.field_proposed = Eigen::VectorXd::Zero(state.fields.size());
  counters.field_accepted = Eigen::VectorXd::Zero(state.fields.size());

  long n_mean = 0;
  if (!minimizer_library.empty()) {
    out.mn_trace.reserve(config.n_samples + 1);
    out.mn_trace.push_back(nearest_minimizer(state.u_a, minimizer_library, grid));
  }
  for (long sweep = 1; sweep <= config.n_samples; ++sweep) {
    gibbs_sweep(state, potential, priors, geom_prior, model, grid, config, rng, counters);
    out.phi_trace.push_back(state.phi);
    if (!minimizer_library.empty())
      out.mn_trace.push_back(nearest_minimizer(state.u_a, minimizer_library, grid));
    if (sweep > config.burn_in) {
      out.conditional_mean += state.u_a;
      ++n_mean;
    }
    if (sweep % config.thin == 0)
      out.states.push_back({sweep, state.fields, state.a});
  }
  if (n_mean > 0) out.conditional_mean /= double(n_mean);
  out.accept_geometry =
      counters.geometry_proposed ? double(counters.geometry_accepted) / counters.geometry_proposed : 0.0;
  for (Eigen::Index i = 0; i < out.accept_fields.size(); ++i)
    out.accept_fields[i] =
        counters.field_proposed[i] ? counters.field_accepted[i] / counters.field_proposed[i] : 0.0;
  return out;
}

}  // namespace pwdarcy
