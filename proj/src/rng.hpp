#pragma once

#include <array>
#include <cstdint>

namespace driftwatch {

/// Seed-reproducible random stream. A stream is addressed by (seed, substream);
/// the same pair always yields the same draw sequence. The generator is a
/// self-contained xoshiro256++ (seeded through splitmix64), so the integer
/// stream does not depend on any library implementation; the continuous
/// transforms below are plain closed-form maps of that stream.
///
/// Substreams are independent for practical purposes. One RngStream must not
/// be shared across concurrent workers; give each worker its own substream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t substream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform01();

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal (Box-Muller; the spare deviate is cached).
  double normal();

  /// Exponential with the given rate.
  double exponential(double rate);

  /// Gamma with the given shape and unit scale (Marsaglia-Tsang).
  double gamma(double shape);

  double chi_square(double dof);

  double beta(double a, double b);

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  std::uint64_t substream_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Standard normal CDF, accurate to better than 1e-12 over the real line.
double normal_cdf(double z);

}  // namespace driftwatch
