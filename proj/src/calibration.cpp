#include "calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace driftwatch {

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// One simulated stream advanced in lockstep with its peers: a ring buffer of
// the last w norms plus the stream's private rng.
struct StreamState {
  RngStream rng;
  std::vector<double> ring;
  int head = 0;

  StreamState(std::uint64_t seed, std::uint64_t substream, int w)
      : rng(seed, substream), ring(static_cast<std::size_t>(w)) {}

  void push(double norm) {
    ring[head] = norm;
    head = (head + 1) % static_cast<int>(ring.size());
  }

  void window_in_order(std::vector<double>& out) const {
    const int w = static_cast<int>(ring.size());
    for (int k = 0; k < w; ++k) out[k] = ring[(head + k) % w];
  }
};

}  // namespace

void validate(const CalibrationSettings& settings) {
  validate(settings.cfg);
  if (!(settings.alpha > 0.0) || !(settings.alpha < 0.5))
    fail_invalid("calibration: alpha must be in (0, 0.5)");
  if (settings.survivor_floor < 10)
    fail_invalid("calibration: survivor_floor must be >= 10");
  if (settings.replications < settings.survivor_floor)
    fail_invalid("calibration: replications must be >= survivor_floor");
  if (settings.sequence_length < settings.cfg.w)
    fail_invalid("calibration: sequence_length must be >= w");
  if (settings.tail_pool < 1)
    fail_invalid("calibration: tail_pool must be >= 1");
}

double ControlLimits::limit_for_window(std::uint64_t window) const {
  if (window == 0) fail_invalid("limit_for_window: windows are 1-based");
  if (window <= limits.size()) return limits[window - 1];
  return tail_limit;
}

CalibrationResult calibrate(const CalibrationSettings& settings) {
  validate(settings);
  const int w = settings.cfg.w;
  const int max_windows = settings.sequence_length - w + 1;
  const int m_reps = settings.replications;
  const Sampler sampler(settings.source);

  std::vector<StreamState> streams;
  streams.reserve(static_cast<std::size_t>(m_reps));
  for (int r = 0; r < m_reps; ++r)
    streams.emplace_back(settings.seed, static_cast<std::uint64_t>(r), w);

  // Warm every stream up to w-1 observations; window i then closes on the
  // (w+i-1)th observation.
  for (int k = 0; k < w - 1; ++k)
    for (auto& s : streams) s.push(sampler.sample_norm(s.rng));

  std::vector<int> alive(static_cast<std::size_t>(m_reps));
  for (int r = 0; r < m_reps; ++r) alive[r] = r;

  CalibrationResult result;
  result.limits.alpha = settings.alpha;
  result.limits.cfg = settings.cfg;
  result.limits.replications = settings.replications;
  result.limits.survivor_floor = settings.survivor_floor;
  result.limits.seed = settings.seed;

  std::vector<double> window_scratch(static_cast<std::size_t>(w));
  std::vector<double> parts(static_cast<std::size_t>(settings.cfg.partition_count()));
  std::vector<double> stats;
  std::vector<int> next_alive;

  for (int window = 1; window <= max_windows; ++window) {
    if (static_cast<int>(alive.size()) < settings.survivor_floor) break;

    stats.clear();
    stats.reserve(alive.size());
    for (int r : alive) {
      auto& s = streams[static_cast<std::size_t>(r)];
      s.push(sampler.sample_norm(s.rng));
      s.window_in_order(window_scratch);
      partition_statistics_into(window_scratch, settings.cfg, parts);
      stats.push_back(window_statistic(parts));
    }

    const double h = quantile(stats, 1.0 - settings.alpha);
    result.limits.limits.push_back(h);
    result.survivors.push_back(static_cast<int>(alive.size()));

    next_alive.clear();
    int raised = 0;
    for (std::size_t k = 0; k < alive.size(); ++k) {
      if (stats[k] >= h) {
        ++raised;
        result.run_lengths.push_back(static_cast<std::uint64_t>(window));
      } else {
        next_alive.push_back(alive[k]);
      }
    }
    result.signaled.push_back(raised);
    alive.swap(next_alive);
  }

  result.censored = alive.size();
  result.limits.estimated_through =
      static_cast<int>(result.limits.limits.size());
  if (result.limits.estimated_through == 0)
    fail_invalid("calibration: no windows could be estimated");

  const int pool = std::min(settings.tail_pool, result.limits.estimated_through);
  std::vector<double> tail(result.limits.limits.end() - pool,
                           result.limits.limits.end());
  result.limits.tail_limit = median_of(std::move(tail));
  return result;
}

std::vector<double> conditional_exceedance(const ControlLimits& limits,
                                           const DistributionSpec& spec,
                                           int replications, std::uint64_t seed) {
  if (replications < 1000)
    fail_invalid("conditional_exceedance: need at least 1000 replications");
  if (limits.estimated_through < 1)
    fail_invalid("conditional_exceedance: empty limit sequence");
  const WindowConfig cfg = limits.cfg;
  validate(cfg);
  const int w = cfg.w;
  const int windows = limits.estimated_through;
  const Sampler sampler(spec);

  std::vector<std::uint64_t> exceed(static_cast<std::size_t>(windows), 0);
  std::vector<std::uint64_t> at_risk(static_cast<std::size_t>(windows), 0);
  std::vector<double> window_scratch(static_cast<std::size_t>(w));
  std::vector<double> parts(static_cast<std::size_t>(cfg.partition_count()));

  for (int r = 0; r < replications; ++r) {
    StreamState s(seed, static_cast<std::uint64_t>(r), w);
    for (int k = 0; k < w - 1; ++k) s.push(sampler.sample_norm(s.rng));
    for (int window = 1; window <= windows; ++window) {
      s.push(sampler.sample_norm(s.rng));
      s.window_in_order(window_scratch);
      partition_statistics_into(window_scratch, cfg, parts);
      const double t = window_statistic(parts);
      ++at_risk[window - 1];
      if (t >= limits.limits[window - 1]) {
        ++exceed[window - 1];
        break;
      }
    }
  }

  std::vector<double> rates(static_cast<std::size_t>(windows), 0.0);
  for (int i = 0; i < windows; ++i) {
    rates[i] = (at_risk[i] > 0)
                   ? static_cast<double>(exceed[i]) / static_cast<double>(at_risk[i])
                   : 0.0;
  }
  return rates;
}

}  // namespace driftwatch
