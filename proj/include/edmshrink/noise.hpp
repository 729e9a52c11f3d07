#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "edmshrink/types.hpp"

namespace edmshrink {

/// Counter-based 64-bit generator. Output k of the stream keyed by
/// (seed, replicate, stream) is mix64(key + (k + 1) * 0x9E3779B97F4A7C15), where
/// mix64 is the SplitMix64 finalizer and key = mix64(seed ^ mix64(replicate ^
/// mix64(stream))). Any draw can be reached directly by setting the counter,
/// so streams are independent of execution order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Jump to draw number `counter` of this stream.
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }
  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix64(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class NoiseKind { gaussian, gamma };

NoiseKind parse_noise_kind(std::string_view name);
std::string_view to_string(NoiseKind kind);

/// gaussian: x_ij = d_ij + N(0, sigma2). gamma: x_ij ~ Gamma(shape d_ij, rate 1),
/// so mean and variance both equal d_ij.
struct NoiseModel {
  NoiseKind kind = NoiseKind::gaussian;
  double sigma2 = 0.0;  ///< squared-distance units squared; ignored for gamma

  void validate() const;
};

/// Independent noise on each pair i < j; pair (i, j) draws from the stream
/// keyed by (seed, replicate, row-major pair index). The result is symmetric
/// with a zero diagonal; Gaussian noise may produce negative entries.
/// Gamma noise requires every off-diagonal d_ij > 0 (DomainError otherwise).
SymHollowMatrix<double> add_noise(const SymHollowMatrix<double>& d, const NoiseModel& model,
                                  std::uint64_t seed, std::uint64_t replicate = 0);

}  // namespace edmshrink
