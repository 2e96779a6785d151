#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace driftwatch {

/// One observed vector. Entries must be finite; dimension >= 1.
using Observation = std::vector<double>;

/// Windowing parameters: window size w and quarantine constant l0. A window
/// is split at every cut l in [l0, w - l0], giving w - 2*l0 + 1 partitions.
struct WindowConfig {
  int w = 15;
  int l0 = 3;

  int partition_count() const { return w - 2 * l0 + 1; }
  bool operator==(const WindowConfig&) const = default;
};

/// Throws InvalidInput unless l0 >= 1 and w >= 2*l0.
void validate(const WindowConfig& cfg);

enum class ExtremalSide { Upper, Lower };

/// The partition holding the most extreme precedence statistic of a window.
/// `index` is the 1-based position in the partition list; the partition size
/// is l0 + index - 1.
struct ExtremalPartition {
  ExtremalSide side = ExtremalSide::Upper;
  int index = 1;
  int partition_size = 0;
};

/// Euclidean norm, computed as sqrt of the plain sum of squares.
/// Rejects empty or non-finite input.
double l2_norm(std::span<const double> v);

/// Weighted-precedence statistic between an early sample and a late sample of
/// nonnegative values. Counts each early value's bin among the late order
/// statistics (half-open bins anchored at 0 below and +inf above) with weight
/// equal to the number of late values at or above it, normalized by the pair
/// count. Always in [0, 1]: 1 when the early sample entirely precedes the late
/// one, 0 when it entirely follows.
double weighted_precedence(std::span<const double> first,
                           std::span<const double> second);

/// Per-cut precedence statistics for one window, in increasing cut order.
/// Equals weighted_precedence(prefix, suffix) for every cut, bit for bit,
/// via a shared integer pair count.
std::vector<double> partition_statistics(std::span<const double> window,
                                         const WindowConfig& cfg);

/// In-place variant; `out` must hold cfg.partition_count() values.
void partition_statistics_into(std::span<const double> window,
                               const WindowConfig& cfg, std::span<double> out);

/// Order-statistic quantile with linear interpolation at h = (n-1)q + 1.
double quantile(std::span<const double> sample, double q);

/// Same, for an already ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

/// Window plotting statistic: max of the third quartile and one minus the
/// first quartile of the partition statistics. Always in [0.5, 1].
double window_statistic(std::span<const double> parts);

/// Locates the extreme partition statistic. The side is Lower when
/// 1 - min exceeds max, Upper otherwise (ties go Upper); within a side the
/// smallest index attaining the extremum wins. `l0` fixes the partition size
/// of the located index (l0 + index - 1).
ExtremalPartition extremal_partition(std::span<const double> parts, int l0);

/// Change-point estimate for a signal at window r: r + l0 + index - 1.
std::uint64_t estimate_changepoint(std::uint64_t window, const WindowConfig& cfg,
                                   const ExtremalPartition& ext);

}  // namespace driftwatch
