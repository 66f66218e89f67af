#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace pframe {

/// Seedable generator with a fully specified output sequence.
///
/// The raw stream is std::mt19937_64, whose output is fixed by the C++
/// standard. Real-valued draws are derived here (53-bit mantissa fill and
/// Box-Muller) instead of through <random> distributions, whose algorithms
/// are implementation-defined, so reports match across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi);

  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index size);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer mixing (global seed, stream index) into a child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace pframe
