#pragma once

#include <functional>
#include <vector>
#include <Eigen/Core>

#include "pwdarcy/posterior.hpp"

namespace pwdarcy {

struct NmConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_edge = 0.05;   // simplex edge as a fraction of the support width
  double diameter_tol = 1e-6;
  int max_iter = 200;
};

struct GnConfig {
  int max_line_search = 30;
  double armijo = 1e-4;
};

struct EscapeConfig {
  int count = 50;              // R random joint perturbations once stalled
  double geometry_scale = 0.05;  // jitter as a fraction of the support width
  double field_scale = 0.1;      // multiple of a smoothed prior draw
};

struct MapConfig {
  double tol = 1e-5;    // termination threshold on successive Phi values
  int max_outer = 100;
  NmConfig nm;
  GnConfig gn;
  EscapeConfig escape;
};

struct MapResult {
  std::vector<SpectralField> fields;
  Eigen::VectorXd a;
  OmValue om;
  std::vector<OmValue> trace;  // one entry per accepted outer iteration
  int init_id = 0;
  bool converged = false;
};

/// Nelder-Mead minimisation of a bounded objective (+infinity outside the
/// support keeps the simplex inside S). Returns the best vertex once the
/// simplex diameter drops below diameter_tol or max_iter iterations ran.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& a0, const Eigen::VectorXd& scale,
                            const NmConfig& config);

struct GnReport {
  bool accepted = false;
  bool gradient_fallback = false;
  int backtracks = 0;
  double step = 0.0;
};

/// The regularised Gauss-Newton step: solves
///   (D + J^T J / gamma^2) delta = -(J^T r / gamma^2 + D c)
/// through the Woodbury identity (the inner system has observation size).
/// Falls back to the negative gradient if the inner solve degenerates.
Eigen::VectorXd gn_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& residual,
                        const Eigen::VectorXd& d_weights, const Eigen::VectorXd& c,
                        double gamma, bool& gradient_fallback);

/// One regularised Gauss-Newton update of field i with the others fixed:
/// solves (J^T Gamma^{-1} J + D) delta = -(J^T Gamma^{-1} r + D c) in
/// coefficient space and backtracks on I until it strictly decreases.
GnReport gn_field(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                  const GeometricPrior& geom_prior, std::vector<SpectralField>& fields,
                  const Eigen::VectorXd& a, const Eigen::VectorXd& y, int field_index,
                  const GnConfig& config);

/// Alternating minimisation of I: Nelder-Mead on the geometry, Gauss-Newton
/// line search per field, random simultaneous perturbations to escape saddle
/// points, termination once successive Phi values differ by less than tol.
MapResult map_estimate(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                       const GeometricPrior& geom_prior,
                       std::vector<SpectralField> fields, Eigen::VectorXd a,
                       const Eigen::VectorXd& y, const MapConfig& config, Rng& rng,
                       int init_id = 0);

}  // namespace pwdarcy
