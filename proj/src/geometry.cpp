#include "pwdarcy/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace pwdarcy {

namespace {

constexpr double kFaultX = 0.55;

double layer2_interface(const Eigen::VectorXd& a, double x) {
  return a[0] + (a[1] - a[0]) * x;
}

double curve2_interface(const Eigen::VectorXd& a, double x) {
  const double y = a[0] + (a[1] - a[0]) * x + x * std::sin(6.0 * M_PI * x) / 10.0;
  return std::min(1.0, std::max(0.0, y));
}

// Lower (i=0) / upper (i=1) fault interface: straight segments meeting the
// fault line x = 0.55, continued beyond it with the same slope shifted
// vertically by the throw a[4].
double fault3_interface(const Eigen::VectorXd& a, int i, double x) {
  const double left = a[i];
  const double at_fault = a[2 + i];
  const double slope = (at_fault - left) / kFaultX;
  if (x <= kFaultX) return left + slope * x;
  return at_fault + slope * (x - kFaultX) + a[4];
}

int fault3_region(const Eigen::VectorXd& a, double x, double y) {
  if (y <= fault3_interface(a, 0, x)) return 1;
  if (y <= fault3_interface(a, 1, x)) return 2;
  return 3;
}

// Channel centerline c(t) = R(angle) * (t, amp*sin(freq*t)) + (0, offset),
// t in [0, 2]; membership is tested in the rotated frame where the
// centerline is the graph of amp*sin(freq*x).
int channel_region(const Eigen::VectorXd& a, double x, double y) {
  const double amp = a[0], freq = a[1], angle = a[2], offset = a[3], width = a[4];
  const double c = std::cos(angle), s = std::sin(angle);
  const double yy = y - offset;
  const double xr = c * x + s * yy;
  const double yr = -s * x + c * yy;
  if (xr < 0.0 || xr > 2.0) return 2;
  return std::abs(yr - amp * std::sin(freq * xr)) <= width / 2.0 ? 1 : 2;
}

int multilayer_region(const GeometryModel& model, const Eigen::VectorXd& a, double x,
                      double y) {
  const int K = model.layers_K, N = model.layers_N;
  const double dx = 1.0 / (K - 1);
  int j = std::min(static_cast<int>(x / dx), K - 2);
  const double t = (x - j * dx) / dx;
  // interface i (1..N-1) linearly interpolates the column heights a_{i,j}
  for (int i = 1; i < N; ++i) {
    const double lo = a[(i - 1) * K + j];
    const double hi = a[(i - 1) * K + j + 1];
    if (y <= lo + (hi - lo) * t) return i;
  }
  return N;
}

}  // namespace

int GeometryModel::param_count() const {
  switch (tag) {
    case GeometryTag::layer2:
    case GeometryTag::curve2:
      return 2;
    case GeometryTag::multilayer:
      return (layers_N - 1) * layers_K;
    case GeometryTag::fault3:
    case GeometryTag::channel:
      return 5;
  }
  return 0;
}

int GeometryModel::region_count() const {
  switch (tag) {
    case GeometryTag::layer2:
    case GeometryTag::curve2:
    case GeometryTag::channel:
      return 2;
    case GeometryTag::multilayer:
      return layers_N;
    case GeometryTag::fault3:
      return 3;
  }
  return 0;
}

std::string GeometryModel::name() const {
  switch (tag) {
    case GeometryTag::layer2: return "layer2";
    case GeometryTag::curve2: return "curve2";
    case GeometryTag::multilayer: return "multilayer";
    case GeometryTag::fault3: return "fault3";
    case GeometryTag::channel: return "channel";
  }
  return "?";
}

GeometryModel GeometryModel::parse(const std::string& name, int K, int N) {
  GeometryModel m;
  if (name == "layer2") m.tag = GeometryTag::layer2;
  else if (name == "curve2") m.tag = GeometryTag::curve2;
  else if (name == "fault3") m.tag = GeometryTag::fault3;
  else if (name == "channel") m.tag = GeometryTag::channel;
  else if (name == "multilayer") {
    m.tag = GeometryTag::multilayer;
    if (K < 2 || N < 2) throw std::invalid_argument("multilayer needs K >= 2, N >= 2");
    m.layers_K = K;
    m.layers_N = N;
  } else {
    throw std::invalid_argument("unknown geometry model: " + name);
  }
  return m;
}

int region_of_point(const GeometryModel& model, const Eigen::VectorXd& a, double x,
                    double y) {
  switch (model.tag) {
    case GeometryTag::layer2:
      return y <= layer2_interface(a, x) ? 1 : 2;
    case GeometryTag::curve2:
      return y <= curve2_interface(a, x) ? 1 : 2;
    case GeometryTag::fault3:
      return fault3_region(a, x, y);
    case GeometryTag::channel:
      return channel_region(a, x, y);
    case GeometryTag::multilayer:
      return multilayer_region(model, a, x, y);
  }
  return 1;
}

RegionMasks region_masks(const GeometryModel& model, const Eigen::VectorXd& a,
                         const Grid& grid) {
  if (a.size() != model.param_count())
    throw std::invalid_argument("region_masks: parameter vector has length " +
                                std::to_string(a.size()) + ", model " + model.name() +
                                " expects " + std::to_string(model.param_count()));
  const int n = grid.n;
  RegionMasks masks;
  masks.n = n;
  masks.region.resize(n, n);
  masks.areas = Eigen::VectorXd::Zero(model.region_count());
  const double h2 = grid.h * grid.h;
  for (int iy = 0; iy < n; ++iy) {
    const double y = grid.coord(iy);
    for (int ix = 0; ix < n; ++ix) {
      const int r = region_of_point(model, a, grid.coord(ix), y);
      masks.region(ix, iy) = r;
      masks.areas[r - 1] += grid.qw(ix) * grid.qw(iy) * h2;
    }
  }
  return masks;
}

Eigen::VectorXd symmetric_difference_area(const RegionMasks& m1, const RegionMasks& m2) {
  if (m1.n != m2.n)
    throw std::invalid_argument("symmetric_difference_area: grid mismatch");
  const int n = m1.n;
  const Grid grid(n);
  const int nreg = static_cast<int>(std::max(m1.areas.size(), m2.areas.size()));
  Eigen::VectorXd area = Eigen::VectorXd::Zero(nreg);
  const double h2 = grid.h * grid.h;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int r1 = m1.region(ix, iy), r2 = m2.region(ix, iy);
      if (r1 != r2) {
        const double w = grid.qw(ix) * grid.qw(iy) * h2;
        area[r1 - 1] += w;
        area[r2 - 1] += w;
      }
    }
  return area;
}

}  // namespace pwdarcy
