#include "pwdarcy/validate.hpp"

#include <cmath>
#include <stdexcept>

namespace pwdarcy {

void ToyPosterior::validate() const {
  if (dim() > 5)
    throw std::invalid_argument("ToyPosterior: total dimension must stay <= 5");
  if ((coeff_sd.array() <= 0).any())
    throw std::invalid_argument("ToyPosterior: coefficient sd must be positive");
  if (((geom_hi - geom_lo).array() <= 0).any())
    throw std::invalid_argument("ToyPosterior: empty geometry box");
  if (!phi) throw std::invalid_argument("ToyPosterior: missing potential");
}

double ToyPosterior::J(const Eigen::VectorXd& c) const {
  return 0.5 * (c.array() / coeff_sd.array()).square().sum();
}

double ToyPosterior::K(const Eigen::VectorXd& a) const {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] < geom_lo[i] || a[i] > geom_hi[i]) return kInf;
  return ((geom_hi - geom_lo).array().log()).sum();
}

double ToyPosterior::I(const Eigen::VectorXd& c, const Eigen::VectorXd& a) const {
  const double k = K(a);
  if (!std::isfinite(k)) return kInf;
  return phi(c, a) + J(c) + k;
}

std::vector<BallRatioEstimate> small_ball_ratio(
    const ToyPosterior& toy, const Eigen::VectorXd& c1, const Eigen::VectorXd& a1,
    const Eigen::VectorXd& c2, const Eigen::VectorXd& a2,
    const std::vector<double>& deltas, long n_mc, Rng& rng) {
  toy.validate();
  if (n_mc < 1000000)
    throw std::invalid_argument("small_ball_ratio: need at least 1e6 samples");
  for (std::size_t q = 0; q + 1 < deltas.size(); ++q)
    if (deltas[q] <= deltas[q + 1])
      throw std::invalid_argument("small_ball_ratio: deltas must decrease");

  const int nc = static_cast<int>(toy.coeff_sd.size());
  const int na = static_cast<int>(toy.geom_lo.size());
  const int nd = static_cast<int>(deltas.size());

  std::vector<double> s1(nd, 0), s2(nd, 0), q11(nd, 0), q22(nd, 0), q12(nd, 0);
  std::vector<long> h1(nd, 0), h2(nd, 0);

  Eigen::VectorXd c(nc), a(na);
  const auto sup = [](const Eigen::VectorXd& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  };
  for (long it = 0; it < n_mc; ++it) {
    for (int i = 0; i < nc; ++i) c[i] = toy.coeff_sd[i] * rng.normal();
    for (int i = 0; i < na; ++i) a[i] = rng.uniform(toy.geom_lo[i], toy.geom_hi[i]);
    const double d1 = std::max(sup(c - c1), sup(a - a1));
    const double d2 = std::max(sup(c - c2), sup(a - a2));
    if (d1 > deltas[0] && d2 > deltas[0]) continue;
    const double w = std::exp(-toy.phi(c, a));
    for (int q = 0; q < nd; ++q) {
      const bool in1 = d1 <= deltas[q], in2 = d2 <= deltas[q];
      if (!in1 && !in2) break;  // deltas decrease
      if (in1) {
        s1[q] += w;
        q11[q] += w * w;
        ++h1[q];
      }
      if (in2) {
        s2[q] += w;
        q22[q] += w * w;
        ++h2[q];
      }
      if (in1 && in2) q12[q] += w * w;
    }
  }

  std::vector<BallRatioEstimate> out(nd);
  const double n = static_cast<double>(n_mc);
  for (int q = 0; q < nd; ++q) {
    auto& e = out[q];
    e.delta = deltas[q];
    e.hits1 = h1[q];
    e.hits2 = h2[q];
    e.companion = std::exp(toy.I(c2, a2) - toy.I(c1, a1));
    if (h1[q] == 0 || h2[q] == 0) {
      e.zero_hit_warning = true;
      e.ratio = std::numeric_limits<double>::quiet_NaN();
      e.se = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double m1 = s1[q] / n, m2 = s2[q] / n;
    const double v1 = (q11[q] / n - m1 * m1) / n;
    const double v2 = (q22[q] / n - m2 * m2) / n;
    const double c12 = (q12[q] / n - m1 * m2) / n;
    e.ratio = m1 / m2;
    const double rel_var = v1 / (m1 * m1) + v2 / (m2 * m2) - 2.0 * c12 / (m1 * m2);
    e.se = e.ratio * std::sqrt(std::max(rel_var, 0.0));
  }
  return out;
}

FominResult fomin_check(ForwardModel& fm, const std::vector<FieldPrior>& priors,
                        const GeometricPrior& geom_prior,
                        const std::vector<SpectralField>& fields,
                        const Eigen::VectorXd& a, const Eigen::VectorXd& y,
                        const std::vector<FominDirection>& directions, double step) {
  FominResult result;
  const std::vector<Eigen::MatrixXd> grads = fm.grad_phi_fields(fields, a, y);
  const RegionMasks base_masks = region_masks(fm.geometry(), a, fm.grid());

  for (const auto& dir : directions) {
    // stencil admissibility in the geometry block
    const Eigen::VectorXd a_plus = a + step * dir.db;
    const Eigen::VectorXd a_minus = a - step * dir.db;
    if (dir.db.cwiseAbs().maxCoeff() > 0) {
      if (!geom_prior.contains(a_plus) || !geom_prior.contains(a_minus))
        throw std::runtime_error("fomin_check: a too close to the support boundary "
                                 "for the FD stencil");
      const RegionMasks mp = region_masks(fm.geometry(), a_plus, fm.grid());
      const RegionMasks mm = region_masks(fm.geometry(), a_minus, fm.grid());
      if ((mp.region.array() != base_masks.region.array()).any() ||
          (mm.region.array() != base_masks.region.array()).any())
        throw std::runtime_error("fomin_check: region masks flip inside the FD "
                                 "stencil; pick a smaller step or direction");
    }

    // analytic directional derivative of I
    double analytic = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      analytic += (grads[i].array() * dir.dh[i].array()).sum();
      analytic +=
          (cm_weights(priors[i]).array() * fields[i].coeffs.array() * dir.dh[i].array())
              .sum();
    }
    if (dir.db.cwiseAbs().maxCoeff() > 0 && geom_prior.grad_log_density_fn)
      analytic += -geom_prior.grad_log_density_fn(a).dot(dir.db);

    // central finite difference of I
    auto i_at = [&](double t) {
      std::vector<SpectralField> f = fields;
      for (std::size_t i = 0; i < f.size(); ++i) f[i].coeffs += t * dir.dh[i];
      return om_functional(fm, priors, geom_prior, f, a + t * dir.db, y).total();
    };
    const double fd = (i_at(step) - i_at(-step)) / (2.0 * step);

    const double denom = std::max(std::abs(fd), 1e-12);
    result.analytic.push_back(analytic);
    result.fd.push_back(fd);
    result.rel_err.push_back(std::abs(analytic - fd) / denom);
    result.max_rel_err = std::max(result.max_rel_err, result.rel_err.back());
  }
  return result;
}

namespace {

// nodal |grad p|^2 from central differences (one-sided at the boundary)
Eigen::MatrixXd grad_squared(const Grid& grid, const Eigen::MatrixXd& p) {
  const int n = grid.n;
  Eigen::MatrixXd g(n, n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int xl = std::max(ix - 1, 0), xr = std::min(ix + 1, n - 1);
      const int yl = std::max(iy - 1, 0), yr = std::min(iy + 1, n - 1);
      const double px = (p(xr, iy) - p(xl, iy)) / ((xr - xl) * grid.h);
      const double py = (p(ix, yr) - p(ix, yl)) / ((yr - yl) * grid.h);
      g(ix, iy) = px * px + py * py;
    }
  return g;
}

}  // namespace

AssumptionsReport assumptions_audit(ForwardModel& fm,
                                    const std::vector<FieldPrior>& priors,
                                    const GeometricPrior& geom_prior, int n_pairs,
                                    double r, Rng& rng) {
  AssumptionsReport report;
  report.phi_min = kInf;
  const int nobs = fm.observer().count();

  auto draw_fields = [&]() {
    std::vector<SpectralField> fields;
    for (const auto& prior : priors) fields.push_back(sample(prior, rng));
    // keep the state inside the radius-r ball of X: rescale the fluctuation
    for (auto& f : fields) {
      SpectralField fluct = f;
      fluct.mean = 0.0;
      const double sup = synthesize(fluct, fm.grid()).cwiseAbs().maxCoeff();
      const double cap = 0.9 * r;
      if (sup > cap) f.coeffs *= cap / sup;
    }
    return fields;
  };
  auto draw_y = [&]() {
    Eigen::VectorXd y(nobs);
    const double bound = r / std::sqrt(double(nobs));
    for (int j = 0; j < nobs; ++j) y[j] = rng.uniform(-bound, bound);
    return y;
  };

  for (int it = 0; it < n_pairs; ++it) {
    const auto fields1 = draw_fields();
    const auto fields2 = draw_fields();
    const Eigen::VectorXd a = geom_prior.sample(rng);
    const Eigen::VectorXd y1 = draw_y();
    const Eigen::VectorXd y2 = draw_y();

    const double phi_11 = fm.potential(fields1, a, y1);
    const double phi_12 = fm.potential(fields1, a, y2);
    const double phi_21 = fm.potential(fields2, a, y1);
    report.phi_min = std::min({report.phi_min, phi_11, phi_12, phi_21});

    const double dy = (y1 - y2).norm();
    if (dy > 0)
      report.m2_empirical = std::max(report.m2_empirical, std::abs(phi_11 - phi_12) / dy);

    double du = 0.0;
    for (std::size_t i = 0; i < fields1.size(); ++i) {
      const Eigen::MatrixXd diff =
          synthesize(fields1[i], fm.grid()) - synthesize(fields2[i], fm.grid());
      du = std::max(du, diff.cwiseAbs().maxCoeff());
    }
    if (du > 0)
      report.m3_empirical = std::max(report.m3_empirical, std::abs(phi_11 - phi_21) / du);
  }

  // continuity in a along a shrinking path, plus the shrinking-set integral
  {
    const auto fields = draw_fields();
    const Eigen::VectorXd y = draw_y();
    Eigen::VectorXd a = geom_prior.clamp_to_support(
        0.5 * (geom_prior.lo + geom_prior.hi) +
        0.1 * geom_prior.width().cwiseProduct(rng.normal_vector(geom_prior.lo.size())));
    Eigen::VectorXd db = rng.normal_vector(a.size());
    db /= db.cwiseAbs().maxCoeff();
    const double phi_base = fm.potential(fields, a, y);

    const RegionMasks base_masks = region_masks(fm.geometry(), a, fm.grid());
    const Eigen::MatrixXd u_a = fm.construct_ua(fields, a);
    DarcyOperator op(fm.grid());
    op.factorize(u_a.array().exp().matrix());
    const Eigen::MatrixXd p =
        op.solve(fm.problem().nodal_f(fm.grid()), fm.problem().nodal_g(fm.grid()));
    const Eigen::MatrixXd g2 = grad_squared(fm.grid(), p);

    double delta = 0.1;
    for (int step = 0; step < 4; ++step, delta *= 0.5) {
      Eigen::VectorXd a_n = geom_prior.clamp_to_support(
          a + delta * geom_prior.width().cwiseProduct(db));
      report.continuity_gaps.push_back(std::abs(fm.potential(fields, a_n, y) - phi_base));

      const RegionMasks masks_n = region_masks(fm.geometry(), a_n, fm.grid());
      double integral = 0.0;
      const Grid& grid = fm.grid();
      const double h2 = grid.h * grid.h;
      for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
          if (base_masks.region(ix, iy) != masks_n.region(ix, iy))
            integral += grid.qw(ix) * grid.qw(iy) * h2 * g2(ix, iy);
      report.shrinking_integrals.push_back(integral);
    }
  }
  return report;
}

}  // namespace pwdarcy
