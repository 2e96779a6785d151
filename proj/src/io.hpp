#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "calibration.hpp"
#include "experiments.hpp"
#include "monitor.hpp"
#include "sampling.hpp"

namespace driftwatch {

/// Pull-based observation source. `next` yields vectors in file order (or
/// lexicographic filename order for image directories) and throws Parse/Io
/// errors naming the offending file and line.
class ObservationReader {
 public:
  virtual ~ObservationReader() = default;
  virtual std::optional<Observation> next() = 0;
  /// True when values are already norm values (one per row) rather than vectors.
  virtual bool yields_norms() const { return false; }
};

/// Comma-separated decimal rows, constant width; optional single header row.
std::unique_ptr<ObservationReader> open_csv(const std::string& path,
                                            bool has_header);

/// Single column of precomputed nonnegative norm values.
std::unique_ptr<ObservationReader> open_norm_column(const std::string& path,
                                                    bool has_header);

/// Directory of portable graymaps (P2/P5, maxval <= 255), read in
/// lexicographic filename order; pixels become a row-major vector.
std::unique_ptr<ObservationReader> open_image_dir(const std::string& path);

/// Limits profile persistence (JSON, format_version 1). Writing is lossless;
/// reading validates the schema and every ControlLimits invariant.
void write_limits(const ControlLimits& limits, const std::string& path);
ControlLimits read_limits(const std::string& path);

/// Trace CSV with header window,statistic,limit,signal,tau_hat (tau_hat blank
/// except on signal rows).
void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

/// Distribution documents. The JSON vocabulary covers every law used by the
/// experiments (see README). Random covariance recipes are resolved to a
/// concrete draw with (resolve_seed, counter) streams, so a document resolves
/// to the same matrices every time.
DistributionSpec parse_distribution_json(const std::string& json_text,
                                         std::uint64_t resolve_seed);

/// Scenario document: {"tau": ..., "ic": {...}, "ooc": {...}}.
ChangeScenario read_scenario_file(const std::string& path,
                                  std::uint64_t resolve_seed);

/// Grid document: {"cells": [{"label", "w", "l0", "limits", "scenario"}...]}.
/// Limits paths are resolved relative to the grid file. Runs every cell and
/// writes the result table as CSV (to stdout when out_csv is empty).
void run_sensitivity_grid_file(const std::string& grid_path, int replications,
                               int horizon, std::uint64_t seed,
                               const std::string& out_csv);

std::string sensitivity_rows_to_csv(const std::vector<SensitivityRow>& rows);

}  // namespace driftwatch
