#pragma once

#include <cstdint>
#include <string>
#include <Eigen/Core>

namespace pwdarcy {

/// Deterministic random stream: xoshiro256++ seeded through SplitMix64.
///
/// Every random quantity in the project is drawn from a stream derived from
/// a root seed and a text label (see seeded_rng below), so reruns reproduce
/// bit-exactly regardless of platform or standard-library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01();

  /// Uniform double in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller (pairs generated, one cached).
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// 64-bit FNV-1a hash of a label.
std::uint64_t fnv1a64(const std::string& label);

/// Derive an independent stream for (root_seed, label). Identical inputs give
/// identical streams; distinct labels give statistically independent ones.
Rng seeded_rng(std::uint64_t root_seed, const std::string& label);

}  // namespace pwdarcy
