#include "rng.hpp"

#include <cmath>

#include "error.hpp"

namespace driftwatch {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t substream)
    : seed_(seed), substream_(substream) {
  std::uint64_t s = seed;
  const std::uint64_t mixed = splitmix64(s);
  s = mixed ^ (substream * 0xD2B74407B1CE6E93ULL + 0x8CB92BA72F3D8DD7ULL);
  for (auto& word : state_) word = splitmix64(s);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() {
  // 53-bit mantissa, centered so the endpoints are excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (!(lo < hi)) fail_invalid("uniform: lo must be < hi");
  return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = kTwoPi * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) fail_invalid("exponential: rate must be > 0");
  return -std::log(uniform01()) / rate;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) fail_invalid("gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost the shape above 1 and correct with a uniform power.
    const double g = gamma(shape + 1.0);
    const double u = uniform01();
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::chi_square(double dof) {
  if (!(dof > 0.0)) fail_invalid("chi_square: dof must be > 0");
  return 2.0 * gamma(0.5 * dof);
}

double RngStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) fail_invalid("beta: shapes must be > 0");
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

double normal_cdf(double z) {
  // Phi(z) = erfc(-z / sqrt(2)) / 2; erfc avoids cancellation in the tails.
  return 0.5 * std::erfc(-z * 0.70710678118654752440084436210485);
}

}  // namespace driftwatch
