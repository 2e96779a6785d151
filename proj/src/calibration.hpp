#pragma once

#include <cstdint>
#include <vector>

#include "sampling.hpp"
#include "stat.hpp"

namespace driftwatch {

struct CalibrationSettings {
  WindowConfig cfg;
  double alpha = 0.004;       // conditional per-window false-alarm rate
  int replications = 10000;   // Monte-Carlo streams
  int sequence_length = 2500; // observations per stream
  int survivor_floor = 100;   // stop estimating below this many live streams
  int tail_pool = 50;         // limits pooled into the frozen tail value
  std::uint64_t seed = 0;
  DistributionSpec source = UniformNormsSpec{};
};

void validate(const CalibrationSettings& settings);

/// Window-indexed control limits. Windows past `estimated_through` use the
/// frozen tail limit.
struct ControlLimits {
  double alpha = 0.004;
  WindowConfig cfg;
  std::vector<double> limits;  // h_1 .. h_m
  double tail_limit = 1.0;
  int estimated_through = 0;   // m = limits.size()
  int replications = 0;
  int survivor_floor = 0;
  std::uint64_t seed = 0;

  double limit_for_window(std::uint64_t window) const;
};

/// Calibration by-product: what happened to each simulated stream, plus the
/// per-window accounting needed to audit the conditional rate.
struct CalibrationResult {
  ControlLimits limits;
  std::vector<std::uint64_t> run_lengths;  // window index of each signal
  std::uint64_t censored = 0;              // streams alive when estimation stopped
  std::vector<int> survivors;              // |A_i| entering each window
  std::vector<int> signaled;               // signals raised at each window
};

/// Estimates the limit sequence: at each window, the 1-alpha quantile of the
/// plotting statistic over streams with no prior signal; exceeding streams are
/// retired. Estimation stops at the survivor floor (or when the simulated
/// sequences run out) and the tail limit is the median of the last tail_pool
/// estimates.
CalibrationResult calibrate(const CalibrationSettings& settings);

/// Fresh-sample estimate of the per-window conditional exceedance rate
/// P[T_i >= h_i | no earlier signal], for windows 1..estimated_through.
std::vector<double> conditional_exceedance(const ControlLimits& limits,
                                           const DistributionSpec& spec,
                                           int replications, std::uint64_t seed);

}  // namespace driftwatch
