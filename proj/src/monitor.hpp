#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "calibration.hpp"
#include "stat.hpp"

namespace driftwatch {

enum class MonitorStatus { Warming, Running, Signaled };

/// A raised alarm: the signaling window, its statistic against its limit, the
/// extreme partition, and the change-point estimate.
struct Signal {
  std::uint64_t window = 0;
  double statistic = 0.0;
  double limit = 0.0;
  ExtremalSide side = ExtremalSide::Upper;
  int partition_index = 0;
  std::uint64_t tau_hat = 0;
};

struct Warming {};

struct Point {
  std::uint64_t window = 0;
  double statistic = 0.0;
  double limit = 0.0;
};

using StepOutcome = std::variant<Warming, Point, Signal>;

struct TraceRow {
  std::uint64_t window = 0;
  double statistic = 0.0;
  double limit = 0.0;
  bool signaled = false;
  std::uint64_t tau_hat = 0;  // meaningful only when signaled
};

/// Online monitoring engine. Feed norms (or observations, reduced to norms
/// internally) one at a time; once w values have arrived, every push emits the
/// next window's statistic against its control limit and raises a Signal when
/// the limit is met. Stops on signal unless restart mode is on, in which case
/// the next push starts a fresh episode with window numbering reset.
///
/// Single-writer: arrival order is the contract. Distinct monitors are
/// independent.
class Monitor {
 public:
  Monitor(const WindowConfig& cfg, ControlLimits limits,
          bool restart_on_signal = false);

  StepOutcome push_norm(double norm);
  StepOutcome push(std::span<const double> observation);

  const std::vector<TraceRow>& trace() const { return trace_; }
  MonitorStatus status() const { return status_; }
  std::uint64_t observations_seen() const { return observations_seen_; }
  std::uint64_t next_window_index() const { return next_window_; }
  const WindowConfig& config() const { return cfg_; }
  const ControlLimits& limits() const { return limits_; }

 private:
  WindowConfig cfg_;
  ControlLimits limits_;
  bool restart_on_signal_ = false;
  MonitorStatus status_ = MonitorStatus::Warming;
  std::vector<double> ring_;
  int head_ = 0;
  std::uint64_t observations_seen_ = 0;
  std::uint64_t next_window_ = 1;
  int dimension_ = 0;  // locked by the first vector push
  std::vector<double> window_scratch_;
  std::vector<double> parts_scratch_;
  std::vector<TraceRow> trace_;

  void reset_episode();
};

}  // namespace driftwatch
