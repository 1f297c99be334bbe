#include "pwdarcy/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pwdarcy {

namespace {

void sort_chains(const std::vector<std::vector<int>>& ordered, Eigen::VectorXd& a) {
  for (const auto& chain : ordered) {
    std::vector<double> vals;
    vals.reserve(chain.size());
    for (int idx : chain) vals.push_back(a[idx]);
    std::sort(vals.begin(), vals.end());
    for (std::size_t q = 0; q < chain.size(); ++q) a[chain[q]] = vals[q];
  }
}

}  // namespace

bool GeometricPrior::contains(const Eigen::VectorXd& a) const {
  if (a.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] < lo[i] || a[i] > hi[i]) return false;
  for (const auto& chain : ordered)
    for (std::size_t q = 0; q + 1 < chain.size(); ++q)
      if (a[chain[q]] > a[chain[q + 1]]) return false;
  return true;
}

double GeometricPrior::log_density(const Eigen::VectorXd& a) const {
  if (!contains(a)) return -kInf;
  if (log_density_fn) return log_density_fn(a);
  return -log_volume;
}

Eigen::VectorXd GeometricPrior::sample(Rng& rng) const {
  if (log_density_fn)
    throw std::logic_error("GeometricPrior: sampling a custom density is not supported");
  Eigen::VectorXd a(lo.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = rng.uniform(lo[i], hi[i]);
  // order statistics of iid uniforms are uniform on the simplex
  sort_chains(ordered, a);
  return a;
}

Eigen::VectorXd GeometricPrior::clamp_to_support(const Eigen::VectorXd& a) const {
  Eigen::VectorXd out = a.cwiseMax(lo).cwiseMin(hi);
  sort_chains(ordered, out);
  return out;
}

GeometricPrior GeometricPrior::standard(const GeometryModel& model) {
  GeometricPrior p;
  p.model = model;
  const int k = model.param_count();
  switch (model.tag) {
    case GeometryTag::layer2:
    case GeometryTag::curve2:
      p.lo = Eigen::VectorXd::Zero(2);
      p.hi = Eigen::VectorXd::Ones(2);
      p.log_volume = 0.0;
      break;
    case GeometryTag::fault3:
      // U(S) x U(S) x U([-0.3, 0.3]), S = {0 <= x <= y <= 1}
      p.lo.resize(5);
      p.hi.resize(5);
      p.lo << 0, 0, 0, 0, -0.3;
      p.hi << 1, 1, 1, 1, 0.3;
      p.ordered = {{0, 1}, {2, 3}};
      p.log_volume = std::log(0.5 * 0.5 * 0.6);
      break;
    case GeometryTag::channel:
      p.lo.resize(5);
      p.hi.resize(5);
      p.lo << 0, M_PI, -M_PI / 4, 0, 0;
      p.hi << 1, 4 * M_PI, M_PI / 4, 1, 0.4;
      p.log_volume = std::log((3 * M_PI) * (M_PI / 2) * 0.4);
      break;
    case GeometryTag::multilayer: {
      p.lo = Eigen::VectorXd::Zero(k);
      p.hi = Eigen::VectorXd::Ones(k);
      const int K = model.layers_K, N = model.layers_N;
      for (int col = 0; col < K; ++col) {
        std::vector<int> chain;
        for (int i = 0; i + 1 < N; ++i) chain.push_back(i * K + col);
        p.ordered.push_back(std::move(chain));
      }
      // each column is a uniform (N-1)-simplex of volume 1/(N-1)!
      double lv = 0.0;
      for (int i = 2; i <= N - 1; ++i) lv += std::log(double(i));
      p.log_volume = -double(K) * lv;
      break;
    }
  }
  return p;
}

double geometry_K(const GeometricPrior& prior, const Eigen::VectorXd& a) {
  const double ld = prior.log_density(a);
  return std::isfinite(ld) ? -ld : kInf;
}

double potential(ForwardModel& fm, const std::vector<SpectralField>& fields,
                 const Eigen::VectorXd& a, const Eigen::VectorXd& y) {
  return fm.potential(fields, a, y);
}

OmValue om_functional(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                      const GeometricPrior& geom_prior,
                      const std::vector<SpectralField>& fields,
                      const Eigen::VectorXd& a, const Eigen::VectorXd& y) {
  if (priors.size() != fields.size())
    throw std::invalid_argument("om_functional: priors/fields count mismatch");
  OmValue v;
  v.k = geometry_K(geom_prior, a);
  if (!std::isfinite(v.k)) {
    v.phi = 0.0;
    v.j = 0.0;
    return v;
  }
  for (std::size_t i = 0; i < fields.size(); ++i) v.j += cm_norm(priors[i], fields[i]);
  v.phi = fm.potential(fields, a, y);
  return v;
}

double accept_ratio_fields(double phi_current, double phi_proposed) {
  if (phi_proposed <= phi_current) return 1.0;
  return std::exp(phi_current - phi_proposed);
}

}  // namespace pwdarcy
