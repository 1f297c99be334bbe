#pragma once

#include <Eigen/Core>

#include "pwdarcy/grid.hpp"
#include "pwdarcy/rng.hpp"

namespace pwdarcy {

/// Gaussian field prior N(mean, scale * A^{-alpha}) where A is the Neumann
/// Laplacian on [0,1]^2 restricted to zero-mean functions, truncated at
/// wavenumber M per axis. Requires alpha > 1 so draws are continuous.
struct FieldPrior {
  double mean = 0.0;
  double alpha = 1.4;
  double scale = 1.0;
  int truncation = 63;

  void validate() const;
};

/// A single scalar field: constant mean plus fluctuation coefficients on the
/// orthonormal cosine basis phi_kl(x,y) = n_kl cos(k pi x) cos(l pi y),
/// 0 <= k,l <= M, with the (0,0) slot identically zero (zero-mean fluctuation).
struct SpectralField {
  double mean = 0.0;
  Eigen::MatrixXd coeffs;  // (M+1) x (M+1), entry (0,0) == 0

  int truncation() const { return static_cast<int>(coeffs.rows()) - 1; }
};

/// Laplacian eigenvalues pi^2 (k^2 + l^2) for 0 <= k,l <= M.
Eigen::MatrixXd laplacian_eigenvalues(int truncation);

/// Cameron-Martin weights lambda^alpha / scale; the (0,0) slot is zero.
Eigen::MatrixXd cm_weights(const FieldPrior& prior);

/// Basis evaluation matrix B with B(k, i) = n_k cos(k pi x_i); the nodal
/// synthesis of a coefficient matrix C is mean + B^T C B.
Eigen::MatrixXd cosine_basis(int truncation, const Grid& grid);

/// Draw c_kl = sqrt(scale) * lambda_kl^{-alpha/2} * xi_kl, xi iid standard
/// normal, deterministic in the rng state.
SpectralField sample(const FieldPrior& prior, Rng& rng);

/// A draw with exponent alpha + d/2 (d = 2): lies in the Cameron-Martin space
/// of the prior at any finite truncation. Used to initialise minimisation.
SpectralField smoothed_sample(const FieldPrior& prior, Rng& rng);

/// Nodal values mean + sum c_kl phi_kl at the grid vertices. Requires
/// truncation <= n-1 (no aliasing above the grid Nyquist wavenumber).
Eigen::MatrixXd synthesize(const SpectralField& field, const Grid& grid);

/// Cameron-Martin functional J = 1/2 sum c_kl^2 lambda_kl^alpha / scale.
double cm_norm(const FieldPrior& prior, const SpectralField& field);

}  // namespace pwdarcy
