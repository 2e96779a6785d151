#include "experiments.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"

namespace driftwatch {

namespace {

double median_inplace(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void validate(const ChangeScenario& scenario) {
  if (scenario.tau < 1) fail_invalid("scenario: tau must be >= 1");
  const Sampler ic(scenario.ic);
  const Sampler ooc(scenario.ooc);
  if (ic.emits_norms() != ooc.emits_norms())
    fail_invalid("scenario: ic and ooc must both be vector laws or both be "
                 "direct norm laws");
  if (!ic.emits_norms() && ic.dimension() != ooc.dimension())
    fail_invalid("scenario: ic dimension " + std::to_string(ic.dimension()) +
                 " does not match ooc dimension " +
                 std::to_string(ooc.dimension()));
}

RunLengthSummary ic_study(const ControlLimits& limits,
                          const DistributionSpec& spec, int replications,
                          int max_windows, std::uint64_t seed) {
  if (replications < 1000) fail_invalid("ic_study: need at least 1000 replications");
  if (max_windows < 1) fail_invalid("ic_study: max_windows must be >= 1");
  const Sampler sampler(spec);
  const int w = limits.cfg.w;

  std::vector<double> run_lengths;
  run_lengths.reserve(static_cast<std::size_t>(replications));
  std::uint64_t censored = 0;
  double total = 0.0;

  for (int r = 0; r < replications; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    Monitor monitor(limits.cfg, limits);
    std::uint64_t rl = static_cast<std::uint64_t>(max_windows);
    bool signaled = false;
    const std::uint64_t max_obs =
        static_cast<std::uint64_t>(max_windows) + static_cast<std::uint64_t>(w) - 1;
    for (std::uint64_t i = 0; i < max_obs; ++i) {
      const StepOutcome outcome = monitor.push_norm(sampler.sample_norm(rng));
      if (const auto* signal = std::get_if<Signal>(&outcome)) {
        rl = signal->window;
        signaled = true;
        break;
      }
    }
    if (!signaled) ++censored;
    run_lengths.push_back(static_cast<double>(rl));
    total += static_cast<double>(rl);
  }

  RunLengthSummary summary;
  summary.n_runs = static_cast<std::uint64_t>(replications);
  summary.censored = censored;
  summary.horizon = static_cast<std::uint64_t>(max_windows);
  summary.arl = total / static_cast<double>(replications);
  summary.mrl = median_inplace(run_lengths);
  return summary;
}

RunLengthSummary ooc_study(const ControlLimits& limits,
                           const ChangeScenario& scenario, int replications,
                           int horizon, std::uint64_t seed) {
  if (replications < 1000) fail_invalid("ooc_study: need at least 1000 replications");
  if (static_cast<std::uint64_t>(horizon) <= scenario.tau)
    fail_invalid("ooc_study: horizon must exceed tau");
  validate(scenario);
  const Sampler ic(scenario.ic);
  const Sampler ooc(scenario.ooc);
  const int w = limits.cfg.w;

  std::vector<double> run_lengths;
  std::vector<double> tau_hats;
  run_lengths.reserve(static_cast<std::size_t>(replications));
  std::uint64_t censored = 0;
  std::uint64_t detections = 0;
  double total = 0.0;

  for (int r = 0; r < replications; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    Monitor monitor(limits.cfg, limits);
    std::uint64_t rl = static_cast<std::uint64_t>(horizon);
    bool signaled = false;
    const std::uint64_t max_obs =
        static_cast<std::uint64_t>(horizon) + static_cast<std::uint64_t>(w) - 1;
    for (std::uint64_t i = 0; i < max_obs; ++i) {
      const double norm = (i < scenario.tau) ? ic.sample_norm(rng)
                                             : ooc.sample_norm(rng);
      const StepOutcome outcome = monitor.push_norm(norm);
      if (const auto* signal = std::get_if<Signal>(&outcome)) {
        rl = signal->window;
        signaled = true;
        tau_hats.push_back(static_cast<double>(signal->tau_hat));
        if (signal->window + static_cast<std::uint64_t>(w) - 1 > scenario.tau)
          ++detections;
        break;
      }
    }
    if (!signaled) ++censored;
    run_lengths.push_back(static_cast<double>(rl));
    total += static_cast<double>(rl);
  }

  RunLengthSummary summary;
  summary.n_runs = static_cast<std::uint64_t>(replications);
  summary.censored = censored;
  summary.horizon = static_cast<std::uint64_t>(horizon);
  summary.arl = total / static_cast<double>(replications);
  summary.mrl = median_inplace(run_lengths);
  summary.detection_rate =
      static_cast<double>(detections) / static_cast<double>(replications);
  if (!tau_hats.empty()) summary.median_tau_hat = median_inplace(tau_hats);
  return summary;
}

std::vector<SensitivityRow> sensitivity_grid(
    std::span<const SensitivityCell> cells, int replications, int horizon,
    std::uint64_t seed) {
  std::vector<SensitivityRow> rows;
  rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const SensitivityCell& cell = cells[c];
    // Disjoint seed per cell so cells draw independent replicate streams.
    const std::uint64_t cell_seed = seed ^ (0x5B1CE6E9ULL + (c << 32));
    // horizon <= 0 means the default simulated sequence of 2500 observations.
    const int cell_horizon =
        horizon > 0 ? horizon : 2500 - cell.limits.cfg.w + 1;
    const RunLengthSummary summary = ooc_study(cell.limits, cell.scenario,
                                               replications, cell_horizon,
                                               cell_seed);
    SensitivityRow row;
    row.label = cell.label;
    row.w = cell.limits.cfg.w;
    row.l0 = cell.limits.cfg.l0;
    row.tau = cell.scenario.tau;
    row.detection_rate = summary.detection_rate.value_or(0.0);
    row.mrl1 = summary.mrl;
    row.median_tau_hat = summary.median_tau_hat.value_or(0.0);
    row.censored = summary.censored;
    rows.push_back(std::move(row));
  }
  return rows;
}

int default_horizon_for(const WindowConfig& cfg) { return 2500 - cfg.w + 1; }

}  // namespace driftwatch
