#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "calibration.hpp"
#include "monitor.hpp"
#include "sampling.hpp"

namespace driftwatch {

/// A planted change: the first `tau` observations come from `ic`, everything
/// from observation tau+1 on comes from `ooc`.
struct ChangeScenario {
  DistributionSpec ic;
  DistributionSpec ooc;
  std::uint64_t tau = 1;
};

void validate(const ChangeScenario& scenario);

/// Run-length aggregates over Monte-Carlo replicates. Run lengths are window
/// indices of the first signal; replicates with no signal inside the horizon
/// are censored there (so the mean is a lower bound when censored > 0, and
/// the median is exact while the censored fraction stays below one half).
struct RunLengthSummary {
  double arl = 0.0;
  double mrl = 0.0;
  std::uint64_t n_runs = 0;
  std::uint64_t censored = 0;
  std::uint64_t horizon = 0;
  std::optional<double> median_tau_hat;   // set by OOC studies
  std::optional<double> detection_rate;   // set by OOC studies
};

/// In-control run lengths: `replications` fresh streams monitored to first
/// signal or `max_windows`.
RunLengthSummary ic_study(const ControlLimits& limits,
                          const DistributionSpec& spec, int replications,
                          int max_windows, std::uint64_t seed);

/// Out-of-control run lengths under a planted change. A replicate counts as a
/// detection when its first signal lands at a window overlapping or following
/// the change (window r with r + w - 1 > tau) inside the horizon; earlier
/// signals are false alarms. median_tau_hat pools the change-point estimates
/// of all signaling replicates.
RunLengthSummary ooc_study(const ControlLimits& limits,
                           const ChangeScenario& scenario, int replications,
                           int horizon, std::uint64_t seed);

struct SensitivityCell {
  std::string label;
  ControlLimits limits;
  ChangeScenario scenario;
};

struct SensitivityRow {
  std::string label;
  int w = 0;
  int l0 = 0;
  std::uint64_t tau = 0;
  double detection_rate = 0.0;
  double mrl1 = 0.0;
  double median_tau_hat = 0.0;
  std::uint64_t censored = 0;
};

/// One ooc_study per cell, each on its own deterministic seed block. A
/// nonpositive horizon means the default simulated sequence of 2500
/// observations (2500 - w + 1 windows).
std::vector<SensitivityRow> sensitivity_grid(
    std::span<const SensitivityCell> cells, int replications, int horizon,
    std::uint64_t seed);

/// Windows in the default 2500-observation simulated sequence.
int default_horizon_for(const WindowConfig& cfg);

}  // namespace driftwatch
