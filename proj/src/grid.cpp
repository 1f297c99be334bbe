#include "pwdarcy/grid.hpp"

#include <algorithm>
#include <cmath>

namespace pwdarcy {

double integrate(const Grid& grid, const Eigen::MatrixXd& v) {
  const int n = grid.n;
  const double h2 = grid.h * grid.h;
  double s = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      s += grid.qw(ix) * grid.qw(iy) * v(ix, iy);
  return s * h2;
}

double l2_norm(const Grid& grid, const Eigen::MatrixXd& v) {
  return std::sqrt(integrate(grid, v.cwiseAbs2()));
}

double h1_seminorm(const Grid& grid, const Eigen::MatrixXd& v) {
  const int n = grid.n;
  double s = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix + 1 < n; ++ix) {
      const double d = v(ix + 1, iy) - v(ix, iy);
      s += grid.qw(iy) * d * d;
    }
  for (int iy = 0; iy + 1 < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double d = v(ix, iy + 1) - v(ix, iy);
      s += grid.qw(ix) * d * d;
    }
  return std::sqrt(s);  // (d/h)^2 * h^2 = d^2
}

double h1_norm(const Grid& grid, const Eigen::MatrixXd& v) {
  const double l2 = l2_norm(grid, v);
  const double semi = h1_seminorm(grid, v);
  return std::sqrt(l2 * l2 + semi * semi);
}

double interpolate(const Grid& grid, const Eigen::MatrixXd& v, double x, double y) {
  const int n = grid.n;
  const double gx = std::clamp(x, 0.0, 1.0) * (n - 1);
  const double gy = std::clamp(y, 0.0, 1.0) * (n - 1);
  const int ix = std::min(static_cast<int>(gx), n - 2);
  const int iy = std::min(static_cast<int>(gy), n - 2);
  const double tx = gx - ix;
  const double ty = gy - iy;
  return (1 - tx) * (1 - ty) * v(ix, iy) + tx * (1 - ty) * v(ix + 1, iy) +
         (1 - tx) * ty * v(ix, iy + 1) + tx * ty * v(ix + 1, iy + 1);
}

}  // namespace pwdarcy
