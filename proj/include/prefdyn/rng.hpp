#pragma once

#include <array>
#include <cstdint>

#include "prefdyn/types.hpp"

namespace prefdyn {

/// Counter-based random stream (Philox-4x32-10). A stream is addressed by
/// (seed, trial, tag): the seed keys the generator, trial and tag select an
/// independent stream, and draws advance a block counter. Streams are
/// reproducible independently of execution order, so concurrent trials can
/// each own one without coordination.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag);

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  Vector normal_vector(Eigen::Index d);

  /// Index i with probability weights[i] / sum(weights), by inverse CDF.
  std::size_t categorical(const Vector& weights);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint64_t, 2> block_{};
  int available_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Uniform direction on S^{d-1}: a vector of i.i.d. standard normals,
/// normalized. Deterministic given the stream state.
UnitVector sample_unit_sphere(Eigen::Index d, CounterRng& rng);

}  // namespace prefdyn
