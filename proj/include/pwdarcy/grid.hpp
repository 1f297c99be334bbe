#pragma once

#include <stdexcept>
#include <Eigen/Core>

namespace pwdarcy {

/// Uniform vertex grid on [0,1]^2 with n nodes per axis, spacing h = 1/(n-1).
///
/// Nodal fields are stored as n-by-n matrices indexed (ix, iy), so the
/// column-major linear index iy*n + ix is the canonical node id.
struct Grid {
  int n;
  double h;

  explicit Grid(int n_) : n(n_), h(1.0 / (n_ - 1)) {
    if (n_ < 2) throw std::invalid_argument("Grid: need at least 2 nodes per axis");
  }

  double coord(int i) const { return static_cast<double>(i) / (n - 1); }
  bool is_boundary(int ix, int iy) const {
    return ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1;
  }
  int interior_count() const { return (n - 2) * (n - 2); }
  int interior_index(int ix, int iy) const { return (iy - 1) * (n - 2) + (ix - 1); }

  /// Vertex quadrature weight along one axis (trapezoid rule): 1/2 at the ends.
  double qw(int i) const { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }
};

/// Trapezoid-quadrature integral of a nodal field over [0,1]^2.
double integrate(const Grid& grid, const Eigen::MatrixXd& v);

/// Discrete L2 norm (trapezoid quadrature).
double l2_norm(const Grid& grid, const Eigen::MatrixXd& v);

/// Discrete L2 norm of the gradient: midpoint-in-edge, trapezoid transverse.
double h1_seminorm(const Grid& grid, const Eigen::MatrixXd& v);

/// Full H1 norm: sqrt(L2^2 + |grad|^2).
double h1_norm(const Grid& grid, const Eigen::MatrixXd& v);

/// Bilinear interpolation of a nodal field at (x, y) in [0,1]^2.
double interpolate(const Grid& grid, const Eigen::MatrixXd& v, double x, double y);

}  // namespace pwdarcy
