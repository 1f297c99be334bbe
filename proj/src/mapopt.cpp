#include "pwdarcy/mapopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <Eigen/Cholesky>

namespace pwdarcy {

Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& a0, const Eigen::VectorXd& scale,
                            const NmConfig& config) {
  const int k = static_cast<int>(a0.size());
  std::vector<Eigen::VectorXd> vertex(k + 1, a0);
  for (int i = 0; i < k; ++i) vertex[i + 1][i] += config.initial_edge * scale[i];
  std::vector<double> value(k + 1);
  for (int i = 0; i <= k; ++i) value[i] = objective(vertex[i]);
  if (std::none_of(value.begin(), value.end(), [](double v) { return std::isfinite(v); }))
    throw std::runtime_error("nelder_mead: objective infinite on the whole initial simplex");

  std::vector<int> order(k + 1);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return value[i] < value[j]; });
    const int best = order[0], worst = order[k], second_worst = order[k - 1];

    double diameter = 0.0;
    for (int i = 0; i <= k; ++i)
      diameter = std::max(diameter,
                          (vertex[i] - vertex[best]).cwiseAbs().maxCoeff());
    if (diameter < config.diameter_tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
    for (int i = 0; i <= k; ++i)
      if (i != worst) centroid += vertex[i];
    centroid /= k;

    const Eigen::VectorXd reflected =
        centroid + config.reflection * (centroid - vertex[worst]);
    const double f_reflected = objective(reflected);

    if (f_reflected < value[best]) {
      const Eigen::VectorXd expanded =
          centroid + config.expansion * (reflected - centroid);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }
    if (f_reflected < value[worst]) {
      const Eigen::VectorXd outside =
          centroid + config.contraction * (reflected - centroid);
      const double f_outside = objective(outside);
      if (f_outside <= f_reflected) {
        vertex[worst] = outside;
        value[worst] = f_outside;
        continue;
      }
    } else {
      const Eigen::VectorXd inside =
          centroid - config.contraction * (centroid - vertex[worst]);
      const double f_inside = objective(inside);
      if (f_inside < value[worst]) {
        vertex[worst] = inside;
        value[worst] = f_inside;
        continue;
      }
    }
    for (int i = 0; i <= k; ++i) {  // shrink toward the best vertex
      if (i == best) continue;
      vertex[i] = vertex[best] + config.shrink * (vertex[i] - vertex[best]);
      value[i] = objective(vertex[i]);
    }
  }
  const auto best_it = std::min_element(value.begin(), value.end());
  return vertex[std::distance(value.begin(), best_it)];
}

namespace {

double om_total(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                const GeometricPrior& geom_prior, const std::vector<SpectralField>& fields,
                const Eigen::VectorXd& a, const Eigen::VectorXd& y) {
  return om_functional(fm, priors, geom_prior, fields, a, y).total();
}

}  // namespace

Eigen::VectorXd gn_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& residual,
                        const Eigen::VectorXd& d_weights, const Eigen::VectorXd& c,
                        double gamma, bool& gradient_fallback) {
  gradient_fallback = false;
  const Eigen::VectorXd g =
      jac.transpose() * (residual / (gamma * gamma)) + d_weights.cwiseProduct(c);
  // Woodbury: (D + J^T J / gamma^2)^{-1} = D^{-1} - D^{-1} J^T
  //           (gamma^2 I + J D^{-1} J^T)^{-1} J D^{-1}
  const Eigen::VectorXd dinv_g = g.cwiseQuotient(d_weights);
  const Eigen::MatrixXd jd = jac * d_weights.cwiseInverse().asDiagonal();
  Eigen::MatrixXd inner = jd * jac.transpose();
  inner.diagonal().array() += gamma * gamma;
  const Eigen::LLT<Eigen::MatrixXd> llt(inner);
  Eigen::VectorXd delta;
  if (llt.info() == Eigen::Success)
    delta = -dinv_g + jd.transpose() * llt.solve(jac * dinv_g);
  if (llt.info() != Eigen::Success || !delta.allFinite()) {
    delta = -g;
    gradient_fallback = true;
  }
  return delta;
}

GnReport gn_field(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                  const GeometricPrior& geom_prior, std::vector<SpectralField>& fields,
                  const Eigen::VectorXd& a, const Eigen::VectorXd& y, int field_index,
                  const GnConfig& config) {
  GnReport report;
  const double gamma = fm.gamma();
  const Eigen::VectorXd r = fm.predict(fields, a) - y;
  const Eigen::MatrixXd jac = fm.observation_jacobian(fields, a, field_index);
  const Eigen::VectorXd d =
      flatten_fluctuation(cm_weights(priors[field_index]));  // strictly positive
  const Eigen::VectorXd c = flatten_fluctuation(fields[field_index].coeffs);

  const Eigen::VectorXd g = jac.transpose() * (r / (gamma * gamma)) +
                            d.cwiseProduct(c);  // exact gradient of I in c_i
  if (g.norm() == 0.0) return report;

  const Eigen::VectorXd delta = gn_step(jac, r, d, c, gamma, report.gradient_fallback);
  const double slope = g.dot(delta);
  if (!(slope < 0.0)) return report;

  const double i_current = om_total(fm, priors, geom_prior, fields, a, y);
  const int trunc = fields[field_index].truncation();
  double t = 1.0;
  for (int ls = 0; ls <= config.max_line_search; ++ls, t *= 0.5) {
    std::vector<SpectralField> trial = fields;
    trial[field_index].coeffs = unflatten_fluctuation(c + t * delta, trunc);
    const double i_trial = om_total(fm, priors, geom_prior, trial, a, y);
    if (i_trial <= i_current + config.armijo * t * slope && i_trial < i_current) {
      fields = std::move(trial);
      report.accepted = true;
      report.backtracks = ls;
      report.step = t;
      return report;
    }
  }
  return report;
}

MapResult map_estimate(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                       const GeometricPrior& geom_prior,
                       std::vector<SpectralField> fields, Eigen::VectorXd a,
                       const Eigen::VectorXd& y, const MapConfig& config, Rng& rng,
                       int init_id) {
  MapResult result;
  result.init_id = init_id;

  OmValue om = om_functional(fm, priors, geom_prior, fields, a, y);
  if (!om.finite())
    throw std::invalid_argument("map_estimate: initial state has infinite I");
  result.trace.push_back(om);  // iteration 0 = the initial state

  const Eigen::VectorXd scale = geom_prior.width();
  double phi_prev = om.phi;

  for (int outer = 0; outer < config.max_outer; ++outer) {
    // geometry update: Nelder-Mead on a -> Phi + K with the fields frozen
    double j_fixed = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) j_fixed += cm_norm(priors[i], fields[i]);
    const auto geom_objective = [&](const Eigen::VectorXd& cand) {
      const double k = geometry_K(geom_prior, cand);
      if (!std::isfinite(k)) return kInf;
      return fm.potential(fields, cand, y) + j_fixed + k;
    };
    a = nelder_mead(geom_objective, a, scale, config.nm);

    // field updates, ascending region index
    for (int i = 0; i < static_cast<int>(fields.size()); ++i)
      gn_field(fm, priors, geom_prior, fields, a, y, i, config.gn);

    om = om_functional(fm, priors, geom_prior, fields, a, y);
    result.trace.push_back(om);

    const bool stalled = std::abs(phi_prev - om.phi) < config.tol;
    phi_prev = om.phi;
    if (!stalled) continue;

    // stalled: attempt joint random perturbations to escape a saddle point
    bool escaped = false;
    for (int attempt = 0; attempt < config.escape.count && !escaped; ++attempt) {
      Eigen::VectorXd a_try = a;
      for (Eigen::Index q = 0; q < a.size(); ++q)
        a_try[q] += config.escape.geometry_scale * scale[q] * rng.uniform(-1.0, 1.0);
      a_try = geom_prior.clamp_to_support(a_try);
      std::vector<SpectralField> fields_try = fields;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const SpectralField bump = smoothed_sample(priors[i], rng);
        fields_try[i].coeffs += config.escape.field_scale * bump.coeffs;
      }
      const OmValue om_try = om_functional(fm, priors, geom_prior, fields_try, a_try, y);
      if (om_try.total() < om.total()) {
        fields = std::move(fields_try);
        a = a_try;
        om = om_try;
        result.trace.push_back(om);
        phi_prev = om.phi;
        escaped = true;
      }
    }
    if (!escaped) {
      result.converged = true;
      break;
    }
  }

  result.fields = std::move(fields);
  result.a = std::move(a);
  result.om = om;
  return result;
}

}  // namespace pwdarcy
