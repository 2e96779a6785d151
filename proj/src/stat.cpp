#include "stat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace driftwatch {

namespace {

void require_norms(std::span<const double> values, const char* what) {
  if (values.empty()) fail_invalid(std::string(what) + ": empty sample");
  for (double d : values) {
    if (!std::isfinite(d)) fail_invalid(std::string(what) + ": non-finite value");
    if (d < 0.0) fail_invalid(std::string(what) + ": negative norm value");
  }
}

// Pair indicator matching the half-open binning: a prefix value of exactly 0
// falls below the lowest bin and contributes nothing.
inline long long precede(double a, double b) {
  return (a > 0.0 && a <= b) ? 1 : 0;
}

}  // namespace

void validate(const WindowConfig& cfg) {
  if (cfg.l0 < 1) fail_invalid("window config: l0 must be >= 1");
  if (cfg.w < 2 * cfg.l0)
    fail_invalid("window config: w must be >= 2*l0 (got w=" +
                 std::to_string(cfg.w) + ", l0=" + std::to_string(cfg.l0) + ")");
}

double l2_norm(std::span<const double> v) {
  if (v.empty()) fail_invalid("l2_norm: empty vector");
  double sum = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) fail_invalid("l2_norm: non-finite coordinate");
    sum += x * x;
  }
  return std::sqrt(sum);
}

double weighted_precedence(std::span<const double> first,
                           std::span<const double> second) {
  require_norms(first, "weighted_precedence: first");
  require_norms(second, "weighted_precedence: second");
  std::vector<double> ordered(second.begin(), second.end());
  std::sort(ordered.begin(), ordered.end());
  const std::size_t m = ordered.size();
  long long weighted = 0;
  for (double x : first) {
    if (!(x > 0.0)) continue;
    const std::size_t below =
        std::lower_bound(ordered.begin(), ordered.end(), x) - ordered.begin();
    weighted += static_cast<long long>(m - below);
  }
  return static_cast<double>(weighted) /
         (static_cast<double>(first.size()) * static_cast<double>(m));
}

void partition_statistics_into(std::span<const double> window,
                               const WindowConfig& cfg, std::span<double> out) {
  validate(cfg);
  if (static_cast<int>(window.size()) != cfg.w)
    fail_invalid("partition_statistics: window length " +
                 std::to_string(window.size()) + " does not match w=" +
                 std::to_string(cfg.w));
  require_norms(window, "partition_statistics");
  const int count = cfg.partition_count();
  if (static_cast<int>(out.size()) != count)
    fail_invalid("partition_statistics: output span has wrong length");

  const int w = cfg.w;
  const int l0 = cfg.l0;
  // Integer pair count for the first cut, then slide the cut one element at a
  // time: moving element `l` from the suffix to the prefix removes its pairs
  // as a suffix member and adds its pairs as a prefix member.
  long long pairs = 0;
  for (int a = 0; a < l0; ++a)
    for (int b = l0; b < w; ++b) pairs += precede(window[a], window[b]);
  out[0] = static_cast<double>(pairs) / (static_cast<double>(l0) * (w - l0));
  for (int l = l0; l < w - l0; ++l) {
    long long gained = 0;
    long long lost = 0;
    for (int a = 0; a < l; ++a) lost += precede(window[a], window[l]);
    for (int b = l + 1; b < w; ++b) gained += precede(window[l], window[b]);
    pairs += gained - lost;
    out[l - l0 + 1] =
        static_cast<double>(pairs) / (static_cast<double>(l + 1) * (w - l - 1));
  }
}

std::vector<double> partition_statistics(std::span<const double> window,
                                         const WindowConfig& cfg) {
  validate(cfg);
  std::vector<double> out(cfg.partition_count());
  partition_statistics_into(window, cfg, out);
  return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail_invalid("quantile: empty sample");
  if (!(q >= 0.0) || !(q <= 1.0)) fail_invalid("quantile: q must be in [0, 1]");
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * q + 1.0;
  const std::size_t j = static_cast<std::size_t>(h);  // 1-based floor
  const double g = h - static_cast<double>(j);
  const double lo = sorted[j - 1];
  const double hi = (j >= n) ? sorted[n - 1] : sorted[j];
  return lo + g * (hi - lo);
}

double quantile(std::span<const double> sample, double q) {
  if (sample.empty()) fail_invalid("quantile: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, q);
}

double window_statistic(std::span<const double> parts) {
  if (parts.empty()) fail_invalid("window_statistic: empty partition list");
  std::vector<double> sorted(parts.begin(), parts.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = quantile_sorted(sorted, 0.25);
  const double q3 = quantile_sorted(sorted, 0.75);
  return std::max(q3, 1.0 - q1);
}

ExtremalPartition extremal_partition(std::span<const double> parts, int l0) {
  if (parts.empty()) fail_invalid("extremal_partition: empty partition list");
  if (l0 < 1) fail_invalid("extremal_partition: l0 must be >= 1");
  std::size_t argmax = 0;
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] > parts[argmax]) argmax = i;
    if (parts[i] < parts[argmin]) argmin = i;
  }
  ExtremalPartition ext;
  if (1.0 - parts[argmin] > parts[argmax]) {
    ext.side = ExtremalSide::Lower;
    ext.index = static_cast<int>(argmin) + 1;
  } else {
    ext.side = ExtremalSide::Upper;
    ext.index = static_cast<int>(argmax) + 1;
  }
  ext.partition_size = l0 + ext.index - 1;
  return ext;
}

std::uint64_t estimate_changepoint(std::uint64_t window, const WindowConfig& cfg,
                                   const ExtremalPartition& ext) {
  validate(cfg);
  if (ext.index < 1 || ext.index > cfg.partition_count())
    fail_invalid("estimate_changepoint: partition index out of range");
  return window + static_cast<std::uint64_t>(cfg.l0) +
         static_cast<std::uint64_t>(ext.index) - 1;
}

}  // namespace driftwatch
