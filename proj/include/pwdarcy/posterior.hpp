#pragma once

#include <functional>
#include <limits>
#include <vector>
#include <Eigen/Core>

#include "pwdarcy/darcy.hpp"
#include "pwdarcy/geometry.hpp"
#include "pwdarcy/gfield.hpp"
#include "pwdarcy/rng.hpp"

namespace pwdarcy {

/// Prior on the geometric parameters: compact support S with a continuous
/// density rho. All the experiment priors are uniform (rho = 1/vol S); a
/// custom continuous density on S may be supplied without changing K's
/// boundary convention, since -log rho is already continuous up to dS.
struct GeometricPrior {
  GeometryModel model;
  Eigen::VectorXd lo, hi;                  // bounding box of S
  std::vector<std::vector<int>> ordered;   // index chains that must be nondecreasing
  double log_volume = 0.0;                 // of S
  std::function<double(const Eigen::VectorXd&)> log_density_fn;  // optional
  // gradient of log rho on int(S); required by fomin_check for non-uniform rho
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_log_density_fn;

  bool contains(const Eigen::VectorXd& a) const;
  double log_density(const Eigen::VectorXd& a) const;  // -inf outside S
  Eigen::VectorXd sample(Rng& rng) const;
  Eigen::VectorXd width() const { return hi - lo; }
  /// Deterministic projection into S (clamp to the box, then restore the
  /// ordering constraints by swapping).
  Eigen::VectorXd clamp_to_support(const Eigen::VectorXd& a) const;

  /// The priors used in the experiments for each model family.
  static GeometricPrior standard(const GeometryModel& model);
};

/// K(a) = -log rho(a) on S (including its boundary, by continuity of rho),
/// +infinity outside.
double geometry_K(const GeometricPrior& prior, const Eigen::VectorXd& a);

/// Onsager-Machlup value I = Phi + J + K with its three components.
struct OmValue {
  double phi = 0.0;
  double j = 0.0;
  double k = 0.0;
  double total() const { return phi + j + k; }
  bool finite() const { return std::isfinite(total()); }
};

/// Phi(u, a; y) = 1/2 |G(u,a) - y|^2 / gamma^2.
double potential(ForwardModel& fm, const std::vector<SpectralField>& fields,
                 const Eigen::VectorXd& a, const Eigen::VectorXd& y);

/// I(u,a) = Phi + sum_i J_i + K; K = +inf outside S short-circuits the solve.
OmValue om_functional(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                      const GeometricPrior& geom_prior,
                      const std::vector<SpectralField>& fields,
                      const Eigen::VectorXd& a, const Eigen::VectorXd& y);

/// pCN acceptance probability min{1, exp(Phi(u) - Phi(v))}; depends on the
/// potential values only, never on prior densities.
double accept_ratio_fields(double phi_current, double phi_proposed);

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace pwdarcy
