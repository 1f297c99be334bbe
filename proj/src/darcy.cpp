#include "pwdarcy/darcy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pwdarcy {

namespace {

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

}  // namespace

PiecewiseField construct(const std::vector<SpectralField>& fields,
                         const RegionMasks& masks, const Grid& grid) {
  const int nreg = static_cast<int>(masks.areas.size());
  if (static_cast<int>(fields.size()) != nreg)
    throw std::invalid_argument("construct: expected " + std::to_string(nreg) +
                                " fields, got " + std::to_string(fields.size()));
  std::vector<Eigen::MatrixXd> nodal;
  nodal.reserve(fields.size());
  for (const auto& f : fields) nodal.push_back(synthesize(f, grid));
  PiecewiseField out;
  out.region = masks.region;
  out.values.resize(grid.n, grid.n);
  for (int iy = 0; iy < grid.n; ++iy)
    for (int ix = 0; ix < grid.n; ++ix)
      out.values(ix, iy) = nodal[masks.region(ix, iy) - 1](ix, iy);
  return out;
}

PiecewiseField construct(const std::vector<SpectralField>& fields,
                         const GeometryModel& model, const Eigen::VectorXd& a,
                         const Grid& grid) {
  return construct(fields, region_masks(model, a, grid), grid);
}

Eigen::MatrixXd PdeProblem::nodal_f(const Grid& grid) const {
  return Eigen::MatrixXd::Constant(grid.n, grid.n, f_value);
}

Eigen::MatrixXd PdeProblem::nodal_g(const Grid& grid) const {
  Eigen::MatrixXd g(grid.n, grid.n);
  for (int iy = 0; iy < grid.n; ++iy)
    for (int ix = 0; ix < grid.n; ++ix) {
      switch (g_kind) {
        case GKind::coord_x: g(ix, iy) = g_value * grid.coord(ix); break;
        case GKind::coord_y: g(ix, iy) = g_value * grid.coord(iy); break;
        case GKind::constant: g(ix, iy) = g_value; break;
      }
    }
  return g;
}

DarcyOperator::DarcyOperator(const Grid& grid) : grid_(grid) {
  if (grid.n < 3) throw std::invalid_argument("DarcyOperator: need n >= 3");
}

void DarcyOperator::factorize(const Eigen::MatrixXd& kappa) {
  const int n = grid_.n;
  if (kappa.rows() != n || kappa.cols() != n)
    throw std::invalid_argument("DarcyOperator: kappa shape mismatch");
  if ((kappa.array() <= 0.0).any())
    throw std::invalid_argument("DarcyOperator: nonpositive permeability");
  kappa_ = kappa;
  wx_.resize(n - 1, n);
  wy_.resize(n, n - 1);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix + 1 < n; ++ix)
      wx_(ix, iy) = harmonic_mean(kappa(ix, iy), kappa(ix + 1, iy));
  for (int iy = 0; iy + 1 < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      wy_(ix, iy) = harmonic_mean(kappa(ix, iy), kappa(ix, iy + 1));

  const double inv_h2 = 1.0 / (grid_.h * grid_.h);
  const int m = grid_.interior_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * m);
  for (int iy = 1; iy + 1 < n; ++iy)
    for (int ix = 1; ix + 1 < n; ++ix) {
      const int row = grid_.interior_index(ix, iy);
      const double ww = wx_(ix - 1, iy), we = wx_(ix, iy);
      const double ws = wy_(ix, iy - 1), wn = wy_(ix, iy);
      trip.emplace_back(row, row, (ww + we + ws + wn) * inv_h2);
      if (ix > 1) trip.emplace_back(row, grid_.interior_index(ix - 1, iy), -ww * inv_h2);
      if (ix + 2 < n) trip.emplace_back(row, grid_.interior_index(ix + 1, iy), -we * inv_h2);
      if (iy > 1) trip.emplace_back(row, grid_.interior_index(ix, iy - 1), -ws * inv_h2);
      if (iy + 2 < n) trip.emplace_back(row, grid_.interior_index(ix, iy + 1), -wn * inv_h2);
    }
  matrix_.resize(m, m);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  if (!analyzed_) {
    ldlt_.analyzePattern(matrix_);
    analyzed_ = true;
  }
  ldlt_.factorize(matrix_);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("DarcyOperator: factorization failed");
}

namespace {

Eigen::MatrixXd scatter_interior(const Grid& grid, const Eigen::VectorXd& x,
                                 const Eigen::MatrixXd& boundary) {
  Eigen::MatrixXd p = boundary;
  for (int iy = 1; iy + 1 < grid.n; ++iy)
    for (int ix = 1; ix + 1 < grid.n; ++ix)
      p(ix, iy) = x[grid.interior_index(ix, iy)];
  return p;
}

}  // namespace

Eigen::MatrixXd DarcyOperator::solve(const Eigen::MatrixXd& f,
                                     const Eigen::MatrixXd& g) const {
  const int n = grid_.n;
  const double inv_h2 = 1.0 / (grid_.h * grid_.h);
  Eigen::VectorXd b(grid_.interior_count());
  for (int iy = 1; iy + 1 < n; ++iy)
    for (int ix = 1; ix + 1 < n; ++ix) {
      double v = f(ix, iy);
      if (ix == 1) v += wx_(0, iy) * g(0, iy) * inv_h2;
      if (ix == n - 2) v += wx_(n - 2, iy) * g(n - 1, iy) * inv_h2;
      if (iy == 1) v += wy_(ix, 0) * g(ix, 0) * inv_h2;
      if (iy == n - 2) v += wy_(ix, n - 2) * g(ix, n - 1) * inv_h2;
      b[grid_.interior_index(ix, iy)] = v;
    }
  const Eigen::VectorXd x = ldlt_.solve(b);
  const double bnorm = b.norm();
  const double resid = (matrix_ * x - b).norm();
  if (resid > 1e-10 * std::max(bnorm, 1e-300))
    throw std::runtime_error("DarcyOperator: solve residual " +
                             std::to_string(resid / std::max(bnorm, 1e-300)) +
                             " exceeds 1e-10");
  return scatter_interior(grid_, x, g);
}

Eigen::MatrixXd DarcyOperator::adjoint_solve(const Eigen::MatrixXd& rhs) const {
  const int n = grid_.n;
  Eigen::VectorXd b(grid_.interior_count());
  for (int iy = 1; iy + 1 < n; ++iy)
    for (int ix = 1; ix + 1 < n; ++ix)
      b[grid_.interior_index(ix, iy)] = rhs(ix, iy);
  const Eigen::VectorXd x = ldlt_.solve(b);
  return scatter_interior(grid_, x, Eigen::MatrixXd::Zero(n, n));
}

Eigen::MatrixXd solve_pressure(const Grid& grid, const Eigen::MatrixXd& kappa,
                               const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) {
  DarcyOperator op(grid);
  op.factorize(kappa);
  return op.solve(f, g);
}

Eigen::MatrixXd kappa_sensitivity(const DarcyOperator& op, const Eigen::MatrixXd& p,
                                  const Eigen::MatrixXd& lam) {
  const Grid& grid = op.grid();
  const int n = grid.n;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  const Eigen::MatrixXd& kappa = op.kappa();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix + 1 < n; ++ix) {
      const double c = (p(ix + 1, iy) - p(ix, iy)) * (lam(ix + 1, iy) - lam(ix, iy)) * inv_h2;
      if (c == 0.0) continue;
      const double kp = kappa(ix, iy), kq = kappa(ix + 1, iy);
      const double denom = (kp + kq) * (kp + kq);
      t(ix, iy) -= 2.0 * kq * kq / denom * c;
      t(ix + 1, iy) -= 2.0 * kp * kp / denom * c;
    }
  for (int iy = 0; iy + 1 < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double c = (p(ix, iy + 1) - p(ix, iy)) * (lam(ix, iy + 1) - lam(ix, iy)) * inv_h2;
      if (c == 0.0) continue;
      const double kp = kappa(ix, iy), kq = kappa(ix, iy + 1);
      const double denom = (kp + kq) * (kp + kq);
      t(ix, iy) -= 2.0 * kq * kq / denom * c;
      t(ix, iy + 1) -= 2.0 * kp * kp / denom * c;
    }
  return t;
}

ObservationSetup ObservationSetup::lattice(int count, double epsilon, double gamma) {
  const int k = static_cast<int>(std::round(std::sqrt(double(count))));
  if (k * k != count)
    throw std::invalid_argument("ObservationSetup: count must be a perfect square");
  ObservationSetup s;
  s.epsilon = epsilon;
  s.gamma = gamma;
  s.points.resize(count, 2);
  int idx = 0;
  for (int j = 1; j <= k; ++j)
    for (int i = 1; i <= k; ++i, ++idx) {
      s.points(idx, 0) = double(i) / (k + 1);
      s.points(idx, 1) = double(j) / (k + 1);
    }
  return s;
}

void ObservationSetup::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("ObservationSetup: epsilon <= 0");
  // gamma = 0 is allowed for noise-free data generation; the potential rejects it
  if (!(gamma >= 0)) throw std::invalid_argument("ObservationSetup: gamma < 0");
  for (Eigen::Index j = 0; j < points.rows(); ++j)
    if (points(j, 0) <= 0 || points(j, 0) >= 1 || points(j, 1) <= 0 || points(j, 1) >= 1)
      throw std::invalid_argument("ObservationSetup: points must be interior to D");
}

Observer::Observer(const ObservationSetup& setup, const Grid& grid) : setup_(setup) {
  setup.validate();
  const int n = grid.n;
  const double h2 = grid.h * grid.h;
  const double pref = 1.0 / (2.0 * M_PI * setup.epsilon);
  weights_.reserve(setup.points.rows());
  for (Eigen::Index j = 0; j < setup.points.rows(); ++j) {
    const double xj = setup.points(j, 0), yj = setup.points(j, 1);
    Eigen::MatrixXd w(n, n);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double dx = grid.coord(ix) - xj, dy = grid.coord(iy) - yj;
        w(ix, iy) = grid.qw(ix) * grid.qw(iy) * h2 * pref *
                    std::exp(-(dx * dx + dy * dy) / (2.0 * setup.epsilon));
      }
    w /= w.sum();
    weights_.push_back(std::move(w));
  }
}

Eigen::VectorXd Observer::observe(const Eigen::MatrixXd& pressure) const {
  Eigen::VectorXd y(count());
  for (int j = 0; j < count(); ++j)
    y[j] = (weights_[j].array() * pressure.array()).sum();
  return y;
}

ForwardModel::ForwardModel(const Grid& grid, const GeometryModel& model,
                           const PdeProblem& problem, const ObservationSetup& obs)
    : grid_(grid),
      model_(model),
      problem_(problem),
      observer_(obs, grid),
      f_nodal_(problem.nodal_f(grid)),
      g_nodal_(problem.nodal_g(grid)),
      op_(grid) {
  // harmonic extension of g and the data-independent norms for the bound check
  op_.factorize(Eigen::MatrixXd::Ones(grid.n, grid.n));
  harmonic_g_ = op_.solve(Eigen::MatrixXd::Zero(grid.n, grid.n), g_nodal_);
  g_norm_ = h1_norm(grid_, harmonic_g_);
  if (f_nodal_.cwiseAbs().maxCoeff() > 0.0) {
    // discrete H^{-1} norm via the Riesz map of the zero-Dirichlet H^1 product
    const int n = grid.n;
    const int m = grid.interior_count();
    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](int r, int c, double v) { trip.emplace_back(r, c, v); };
    for (int iy = 1; iy + 1 < n; ++iy)
      for (int ix = 1; ix + 1 < n; ++ix) {
        const int row = grid.interior_index(ix, iy);
        add(row, row, grid.h * grid.h);  // lumped mass
        // stiffness: sum over the four incident edges with trapezoid
        // transverse weights, interior test functions vanish on the boundary
        const double qy = grid.qw(iy), qx = grid.qw(ix);
        add(row, row, 2.0 * qy + 2.0 * qx);
        if (ix > 1) add(row, grid.interior_index(ix - 1, iy), -qy);
        if (ix + 2 < n) add(row, grid.interior_index(ix + 1, iy), -qy);
        if (iy > 1) add(row, grid.interior_index(ix, iy - 1), -qx);
        if (iy + 2 < n) add(row, grid.interior_index(ix, iy + 1), -qx);
      }
    Eigen::SparseMatrix<double> hmat(m, m);
    hmat.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> riesz(hmat);
    Eigen::VectorXd load(m);
    for (int iy = 1; iy + 1 < n; ++iy)
      for (int ix = 1; ix + 1 < n; ++ix)
        load[grid.interior_index(ix, iy)] = grid.h * grid.h * f_nodal_(ix, iy);
    const Eigen::VectorXd z = riesz.solve(load);
    f_dual_ = std::sqrt(load.dot(z));
  }
}

Eigen::MatrixXd ForwardModel::construct_ua(const std::vector<SpectralField>& fields,
                                           const Eigen::VectorXd& a) const {
  return construct(fields, model_, a, grid_).values;
}

Eigen::VectorXd ForwardModel::predict_from_ua(const Eigen::MatrixXd& u_a) {
  op_.factorize(u_a.array().exp().matrix());
  const Eigen::MatrixXd p = op_.solve(f_nodal_, g_nodal_);
  ++solves_;
  return observer_.observe(p);
}

Eigen::VectorXd ForwardModel::predict(const std::vector<SpectralField>& fields,
                                      const Eigen::VectorXd& a) {
  return predict_from_ua(construct_ua(fields, a));
}

double ForwardModel::potential_from_ua(const Eigen::MatrixXd& u_a,
                                       const Eigen::VectorXd& y) {
  const double gamma = observer_.setup().gamma;
  if (!(gamma > 0))
    throw std::invalid_argument("potential: needs a positive noise level gamma");
  const Eigen::VectorXd r = predict_from_ua(u_a) - y;
  return 0.5 * r.squaredNorm() / (gamma * gamma);
}

double ForwardModel::potential(const std::vector<SpectralField>& fields,
                               const Eigen::VectorXd& a, const Eigen::VectorXd& y) {
  return potential_from_ua(construct_ua(fields, a), y);
}

std::function<double(const Eigen::MatrixXd&)> ForwardModel::potential_fn(
    const Eigen::VectorXd& y) {
  return [this, y](const Eigen::MatrixXd& u_a) { return potential_from_ua(u_a, y); };
}

std::vector<Eigen::MatrixXd> ForwardModel::grad_phi_fields(
    const std::vector<SpectralField>& fields, const Eigen::VectorXd& a,
    const Eigen::VectorXd& y) {
  const RegionMasks masks = region_masks(model_, a, grid_);
  const PiecewiseField pw = construct(fields, masks, grid_);
  const Eigen::MatrixXd kappa = pw.values.array().exp().matrix();
  op_.factorize(kappa);
  const Eigen::MatrixXd p = op_.solve(f_nodal_, g_nodal_);
  const Eigen::VectorXd r = observer_.observe(p) - y;
  const double gamma = observer_.setup().gamma;

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(grid_.n, grid_.n);
  for (int j = 0; j < observer_.count(); ++j)
    rhs += (r[j] / (gamma * gamma)) * observer_.weight(j);
  const Eigen::MatrixXd lam = op_.adjoint_solve(rhs);
  const Eigen::MatrixXd t = kappa_sensitivity(op_, p, lam);
  // chain rule: dPhi/du = dPhi/dkappa * exp(u^a), restricted per region
  const Eigen::MatrixXd nodal = (t.array() * kappa.array()).matrix();

  std::vector<Eigen::MatrixXd> grads;
  grads.reserve(fields.size());
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(grid_.n, grid_.n);
    for (int iy = 0; iy < grid_.n; ++iy)
      for (int ix = 0; ix < grid_.n; ++ix)
        if (pw.region(ix, iy) == i + 1) masked(ix, iy) = nodal(ix, iy);
    const Eigen::MatrixXd b = cosine_basis(fields[i].truncation(), grid_);
    Eigen::MatrixXd g = b * masked * b.transpose();
    g(0, 0) = 0.0;
    grads.push_back(std::move(g));
  }
  return grads;
}

Eigen::MatrixXd ForwardModel::observation_jacobian(
    const std::vector<SpectralField>& fields, const Eigen::VectorXd& a,
    int field_index) {
  const RegionMasks masks = region_masks(model_, a, grid_);
  const PiecewiseField pw = construct(fields, masks, grid_);
  const Eigen::MatrixXd kappa = pw.values.array().exp().matrix();
  op_.factorize(kappa);
  const Eigen::MatrixXd p = op_.solve(f_nodal_, g_nodal_);

  const int m1 = fields[field_index].truncation() + 1;
  const Eigen::MatrixXd b = cosine_basis(fields[field_index].truncation(), grid_);
  Eigen::MatrixXd jac(observer_.count(), m1 * m1 - 1);
  for (int j = 0; j < observer_.count(); ++j) {
    const Eigen::MatrixXd qj = op_.adjoint_solve(observer_.weight(j));
    const Eigen::MatrixXd t = kappa_sensitivity(op_, p, qj);
    Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(grid_.n, grid_.n);
    for (int iy = 0; iy < grid_.n; ++iy)
      for (int ix = 0; ix < grid_.n; ++ix)
        if (pw.region(ix, iy) == field_index + 1)
          masked(ix, iy) = t(ix, iy) * kappa(ix, iy);
    Eigen::MatrixXd g = b * masked * b.transpose();
    g(0, 0) = 0.0;
    jac.row(j) = flatten_fluctuation(g).transpose();
  }
  return jac;
}

BoundCheck ForwardModel::solution_bound_check(const std::vector<SpectralField>& fields,
                                              const Eigen::VectorXd& a) {
  const Eigen::MatrixXd u_a = construct_ua(fields, a);
  const Eigen::MatrixXd kappa = u_a.array().exp().matrix();
  op_.factorize(kappa);
  const Eigen::MatrixXd p = op_.solve(f_nodal_, g_nodal_);
  BoundCheck bc;
  bc.lhs = h1_norm(grid_, p);
  bc.kappa_min = kappa.minCoeff();
  bc.kappa_max = kappa.maxCoeff();
  bc.f_dual = f_dual_;
  bc.g_norm = g_norm_;
  bc.rhs = (f_dual_ + bc.kappa_max * g_norm_) / bc.kappa_min + g_norm_;
  bc.holds = bc.lhs <= bc.rhs * (1.0 + 1e-6);
  return bc;
}

Eigen::VectorXd flatten_fluctuation(const Eigen::MatrixXd& coeffs) {
  const int m1 = static_cast<int>(coeffs.rows());
  Eigen::VectorXd v(m1 * m1 - 1);
  int q = 0;
  for (int k = 0; k < m1; ++k)
    for (int l = 0; l < m1; ++l) {
      if (k == 0 && l == 0) continue;
      v[q++] = coeffs(k, l);
    }
  return v;
}

Eigen::MatrixXd unflatten_fluctuation(const Eigen::VectorXd& v, int truncation) {
  const int m1 = truncation + 1;
  Eigen::MatrixXd coeffs(m1, m1);
  coeffs(0, 0) = 0.0;
  int q = 0;
  for (int k = 0; k < m1; ++k)
    for (int l = 0; l < m1; ++l) {
      if (k == 0 && l == 0) continue;
      coeffs(k, l) = v[q++];
    }
  return coeffs;
}

}  // namespace pwdarcy
