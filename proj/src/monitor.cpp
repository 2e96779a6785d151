#include "monitor.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace driftwatch {

Monitor::Monitor(const WindowConfig& cfg, ControlLimits limits,
                 bool restart_on_signal)
    : cfg_(cfg),
      limits_(std::move(limits)),
      restart_on_signal_(restart_on_signal),
      ring_(static_cast<std::size_t>(cfg.w)),
      window_scratch_(static_cast<std::size_t>(cfg.w)),
      parts_scratch_(static_cast<std::size_t>(cfg.partition_count())) {
  validate(cfg_);
  if (!(cfg_ == limits_.cfg))
    fail_invalid("monitor: window config (w=" + std::to_string(cfg_.w) +
                 ", l0=" + std::to_string(cfg_.l0) +
                 ") does not match the control limits (w=" +
                 std::to_string(limits_.cfg.w) +
                 ", l0=" + std::to_string(limits_.cfg.l0) + ")");
  if (limits_.estimated_through < 1 ||
      limits_.limits.size() !=
          static_cast<std::size_t>(limits_.estimated_through))
    fail_invalid("monitor: malformed control limits");
}

void Monitor::reset_episode() {
  status_ = MonitorStatus::Warming;
  head_ = 0;
  observations_seen_ = 0;
  next_window_ = 1;
}

StepOutcome Monitor::push_norm(double norm) {
  if (!std::isfinite(norm) || norm < 0.0)
    fail_invalid("monitor: norm values must be finite and >= 0");
  if (status_ == MonitorStatus::Signaled) {
    if (!restart_on_signal_)
      fail(ErrorCode::State, "monitor: already signaled; create a new monitor "
                             "or enable restart mode");
    reset_episode();
  }

  ring_[head_] = norm;
  head_ = (head_ + 1) % cfg_.w;
  ++observations_seen_;
  if (observations_seen_ < static_cast<std::uint64_t>(cfg_.w)) return Warming{};

  status_ = MonitorStatus::Running;
  const std::uint64_t window = next_window_++;
  for (int k = 0; k < cfg_.w; ++k)
    window_scratch_[k] = ring_[(head_ + k) % cfg_.w];
  partition_statistics_into(window_scratch_, cfg_, parts_scratch_);
  const double statistic = window_statistic(parts_scratch_);
  const double limit = limits_.limit_for_window(window);

  if (statistic >= limit) {
    const ExtremalPartition ext = extremal_partition(parts_scratch_, cfg_.l0);
    Signal signal;
    signal.window = window;
    signal.statistic = statistic;
    signal.limit = limit;
    signal.side = ext.side;
    signal.partition_index = ext.index;
    signal.tau_hat = estimate_changepoint(window, cfg_, ext);
    status_ = MonitorStatus::Signaled;
    trace_.push_back({window, statistic, limit, true, signal.tau_hat});
    return signal;
  }

  trace_.push_back({window, statistic, limit, false, 0});
  return Point{window, statistic, limit};
}

StepOutcome Monitor::push(std::span<const double> observation) {
  if (observation.empty()) fail_invalid("monitor: empty observation");
  if (dimension_ == 0) {
    dimension_ = static_cast<int>(observation.size());
  } else if (dimension_ != static_cast<int>(observation.size())) {
    fail_invalid("monitor: observation dimension changed mid-stream (" +
                 std::to_string(dimension_) + " -> " +
                 std::to_string(observation.size()) + ")");
  }
  return push_norm(l2_norm(observation));
}

}  // namespace driftwatch
