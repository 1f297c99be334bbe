#include "pwdarcy/gfield.hpp"

#include <cmath>
#include <stdexcept>

namespace pwdarcy {

void FieldPrior::validate() const {
  if (!(alpha > 1.0))
    throw std::invalid_argument("FieldPrior: alpha must exceed d/2 = 1");
  if (!(scale > 0.0)) throw std::invalid_argument("FieldPrior: scale must be positive");
  if (truncation < 1) throw std::invalid_argument("FieldPrior: truncation must be >= 1");
}

Eigen::MatrixXd laplacian_eigenvalues(int truncation) {
  const int m = truncation + 1;
  Eigen::MatrixXd lambda(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l)
      lambda(k, l) = M_PI * M_PI * (double(k) * k + double(l) * l);
  return lambda;
}

Eigen::MatrixXd cm_weights(const FieldPrior& prior) {
  const Eigen::MatrixXd lambda = laplacian_eigenvalues(prior.truncation);
  Eigen::MatrixXd w = (lambda.array().pow(prior.alpha) / prior.scale).matrix();
  w(0, 0) = 0.0;
  return w;
}

Eigen::MatrixXd cosine_basis(int truncation, const Grid& grid) {
  const int m = truncation + 1;
  Eigen::MatrixXd b(m, grid.n);
  for (int k = 0; k < m; ++k) {
    const double norm = (k == 0) ? 1.0 : std::sqrt(2.0);
    for (int i = 0; i < grid.n; ++i)
      b(k, i) = norm * std::cos(k * M_PI * grid.coord(i));
  }
  return b;
}

namespace {

SpectralField sample_with_exponent(const FieldPrior& prior, double alpha, Rng& rng) {
  prior.validate();
  const int m = prior.truncation + 1;
  const Eigen::MatrixXd lambda = laplacian_eigenvalues(prior.truncation);
  SpectralField field;
  field.mean = prior.mean;
  field.coeffs.setZero(m, m);
  const double root_scale = std::sqrt(prior.scale);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      if (k == 0 && l == 0) continue;
      field.coeffs(k, l) = root_scale * std::pow(lambda(k, l), -alpha / 2.0) * rng.normal();
    }
  return field;
}

}  // namespace

SpectralField sample(const FieldPrior& prior, Rng& rng) {
  return sample_with_exponent(prior, prior.alpha, rng);
}

SpectralField smoothed_sample(const FieldPrior& prior, Rng& rng) {
  return sample_with_exponent(prior, prior.alpha + 1.0, rng);
}

Eigen::MatrixXd synthesize(const SpectralField& field, const Grid& grid) {
  if (field.truncation() > grid.n - 1)
    throw std::invalid_argument(
        "synthesize: truncation " + std::to_string(field.truncation()) +
        " exceeds grid Nyquist wavenumber " + std::to_string(grid.n - 1));
  const Eigen::MatrixXd b = cosine_basis(field.truncation(), grid);
  Eigen::MatrixXd nodal = b.transpose() * field.coeffs * b;
  nodal.array() += field.mean;
  return nodal;
}

double cm_norm(const FieldPrior& prior, const SpectralField& field) {
  if (field.truncation() != prior.truncation)
    throw std::invalid_argument("cm_norm: field truncation does not match prior");
  return 0.5 * (cm_weights(prior).array() * field.coeffs.array().square()).sum();
}

}  // namespace pwdarcy
