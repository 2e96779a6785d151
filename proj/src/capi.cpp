#include "driftwatch/driftwatch.h"

#include <cmath>
#include <cstring>
#include <string>

#include "calibration.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "monitor.hpp"
#include "sampling.hpp"
#include "stat.hpp"

using namespace driftwatch;

struct dw_limits {
  ControlLimits impl;
};
struct dw_dist {
  DistributionSpec impl;
};
struct dw_scenario {
  ChangeScenario impl;
};
struct dw_monitor {
  Monitor impl;
};
struct dw_reader {
  std::unique_ptr<ObservationReader> impl;
  Observation current;
};

namespace {

thread_local std::string g_last_error;

dw_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return DW_ERR_INVALID_ARGUMENT;
    case ErrorCode::NotPositiveDefinite: return DW_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::State: return DW_ERR_STATE;
    case ErrorCode::Parse: return DW_ERR_PARSE;
    case ErrorCode::Io: return DW_ERR_IO;
    case ErrorCode::Validation: return DW_ERR_VALIDATION;
  }
  return DW_ERR_INTERNAL;
}

template <typename Fn>
dw_status guarded(Fn&& fn) noexcept {
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DW_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DW_ERR_INTERNAL;
  }
}

dw_status invalid(const char* message) {
  g_last_error = message;
  return DW_ERR_INVALID_ARGUMENT;
}

void fill_step(const StepOutcome& outcome, dw_step* out) {
  std::memset(out, 0, sizeof *out);
  if (std::holds_alternative<Warming>(outcome)) {
    out->kind = DW_STEP_WARMING;
  } else if (const auto* point = std::get_if<Point>(&outcome)) {
    out->kind = DW_STEP_POINT;
    out->window = point->window;
    out->statistic = point->statistic;
    out->limit = point->limit;
  } else {
    const Signal& signal = std::get<Signal>(outcome);
    out->kind = DW_STEP_SIGNAL;
    out->window = signal.window;
    out->statistic = signal.statistic;
    out->limit = signal.limit;
    out->signaled = 1;
    out->side = signal.side == ExtremalSide::Lower ? DW_SIDE_LOWER : DW_SIDE_UPPER;
    out->partition_index = static_cast<uint32_t>(signal.partition_index);
    out->tau_hat = signal.tau_hat;
  }
}

void fill_summary(const RunLengthSummary& summary, dw_run_summary* out) {
  out->arl = summary.arl;
  out->mrl = summary.mrl;
  out->n_runs = summary.n_runs;
  out->censored = summary.censored;
  out->horizon = summary.horizon;
  out->median_tau_hat = summary.median_tau_hat.value_or(std::nan(""));
  out->detection_rate = summary.detection_rate.value_or(std::nan(""));
}

}  // namespace

extern "C" {

const char* dw_version(void) { return "0.1.0"; }

const char* dw_last_error(void) { return g_last_error.c_str(); }

void dw_calibration_settings_init(dw_calibration_settings* settings) {
  if (settings == nullptr) return;
  settings->w = 15;
  settings->l0 = 3;
  settings->alpha = 0.004;
  settings->replications = 10000;
  settings->sequence_length = 2500;
  settings->survivor_floor = 100;
  settings->tail_pool = 50;
  settings->seed = 0;
  settings->source_json = nullptr;
}

dw_status dw_calibrate(const dw_calibration_settings* settings, dw_limits** out) {
  if (settings == nullptr || out == nullptr)
    return invalid("dw_calibrate: null argument");
  return guarded([&] {
    CalibrationSettings cs;
    cs.cfg.w = static_cast<int>(settings->w);
    cs.cfg.l0 = static_cast<int>(settings->l0);
    cs.alpha = settings->alpha;
    cs.replications = static_cast<int>(settings->replications);
    cs.sequence_length = static_cast<int>(settings->sequence_length);
    cs.survivor_floor = static_cast<int>(settings->survivor_floor);
    cs.tail_pool = static_cast<int>(settings->tail_pool);
    cs.seed = settings->seed;
    if (settings->source_json != nullptr)
      cs.source = parse_distribution_json(settings->source_json, settings->seed);
    CalibrationResult result = calibrate(cs);
    *out = new dw_limits{std::move(result.limits)};
    return DW_OK;
  });
}

dw_status dw_limits_load(const char* path, dw_limits** out) {
  if (path == nullptr || out == nullptr)
    return invalid("dw_limits_load: null argument");
  return guarded([&] {
    *out = new dw_limits{read_limits(path)};
    return DW_OK;
  });
}

dw_status dw_limits_save(const dw_limits* limits, const char* path) {
  if (limits == nullptr || path == nullptr)
    return invalid("dw_limits_save: null argument");
  return guarded([&] {
    write_limits(limits->impl, path);
    return DW_OK;
  });
}

void dw_limits_free(dw_limits* limits) { delete limits; }

uint32_t dw_limits_count(const dw_limits* limits) {
  return limits == nullptr ? 0
                           : static_cast<uint32_t>(limits->impl.estimated_through);
}

dw_status dw_limits_at(const dw_limits* limits, uint64_t window, double* out) {
  if (limits == nullptr || out == nullptr)
    return invalid("dw_limits_at: null argument");
  return guarded([&] {
    *out = limits->impl.limit_for_window(window);
    return DW_OK;
  });
}

double dw_limits_tail(const dw_limits* limits) {
  return limits == nullptr ? 0.0 : limits->impl.tail_limit;
}

uint32_t dw_limits_w(const dw_limits* limits) {
  return limits == nullptr ? 0 : static_cast<uint32_t>(limits->impl.cfg.w);
}

uint32_t dw_limits_l0(const dw_limits* limits) {
  return limits == nullptr ? 0 : static_cast<uint32_t>(limits->impl.cfg.l0);
}

double dw_limits_alpha(const dw_limits* limits) {
  return limits == nullptr ? 0.0 : limits->impl.alpha;
}

dw_status dw_dist_parse(const char* json_text, uint64_t resolve_seed,
                        dw_dist** out) {
  if (json_text == nullptr || out == nullptr)
    return invalid("dw_dist_parse: null argument");
  return guarded([&] {
    *out = new dw_dist{parse_distribution_json(json_text, resolve_seed)};
    return DW_OK;
  });
}

void dw_dist_free(dw_dist* dist) { delete dist; }

dw_status dw_scenario_load(const char* path, uint64_t resolve_seed,
                           dw_scenario** out) {
  if (path == nullptr || out == nullptr)
    return invalid("dw_scenario_load: null argument");
  return guarded([&] {
    *out = new dw_scenario{read_scenario_file(path, resolve_seed)};
    return DW_OK;
  });
}

void dw_scenario_free(dw_scenario* scenario) { delete scenario; }

uint64_t dw_scenario_tau(const dw_scenario* scenario) {
  return scenario == nullptr ? 0 : scenario->impl.tau;
}

dw_status dw_monitor_new(const dw_limits* limits, int restart_on_signal,
                         dw_monitor** out) {
  if (limits == nullptr || out == nullptr)
    return invalid("dw_monitor_new: null argument");
  return guarded([&] {
    *out = new dw_monitor{
        Monitor(limits->impl.cfg, limits->impl, restart_on_signal != 0)};
    return DW_OK;
  });
}

void dw_monitor_free(dw_monitor* monitor) { delete monitor; }

dw_status dw_monitor_push_norm(dw_monitor* monitor, double norm, dw_step* out) {
  if (monitor == nullptr || out == nullptr)
    return invalid("dw_monitor_push_norm: null argument");
  return guarded([&] {
    fill_step(monitor->impl.push_norm(norm), out);
    return DW_OK;
  });
}

dw_status dw_monitor_push_vector(dw_monitor* monitor, const double* values,
                                 size_t p, dw_step* out) {
  if (monitor == nullptr || values == nullptr || out == nullptr)
    return invalid("dw_monitor_push_vector: null argument");
  return guarded([&] {
    fill_step(monitor->impl.push(std::span<const double>(values, p)), out);
    return DW_OK;
  });
}

uint64_t dw_monitor_trace_rows(const dw_monitor* monitor) {
  return monitor == nullptr ? 0 : monitor->impl.trace().size();
}

dw_status dw_monitor_trace_row(const dw_monitor* monitor, uint64_t index,
                               dw_step* out) {
  if (monitor == nullptr || out == nullptr)
    return invalid("dw_monitor_trace_row: null argument");
  const auto& trace = monitor->impl.trace();
  if (index >= trace.size()) return invalid("dw_monitor_trace_row: index out of range");
  const TraceRow& row = trace[index];
  std::memset(out, 0, sizeof *out);
  out->kind = row.signaled ? DW_STEP_SIGNAL : DW_STEP_POINT;
  out->window = row.window;
  out->statistic = row.statistic;
  out->limit = row.limit;
  out->signaled = row.signaled ? 1 : 0;
  out->tau_hat = row.tau_hat;
  return DW_OK;
}

dw_status dw_monitor_write_trace_csv(const dw_monitor* monitor, const char* path) {
  if (monitor == nullptr || path == nullptr)
    return invalid("dw_monitor_write_trace_csv: null argument");
  return guarded([&] {
    write_trace_csv(monitor->impl.trace(), path);
    return DW_OK;
  });
}

dw_status dw_reader_open_csv(const char* path, int has_header, dw_reader** out) {
  if (path == nullptr || out == nullptr)
    return invalid("dw_reader_open_csv: null argument");
  return guarded([&] {
    *out = new dw_reader{open_csv(path, has_header != 0), {}};
    return DW_OK;
  });
}

dw_status dw_reader_open_norms(const char* path, int has_header, dw_reader** out) {
  if (path == nullptr || out == nullptr)
    return invalid("dw_reader_open_norms: null argument");
  return guarded([&] {
    *out = new dw_reader{open_norm_column(path, has_header != 0), {}};
    return DW_OK;
  });
}

dw_status dw_reader_open_images(const char* dir, dw_reader** out) {
  if (dir == nullptr || out == nullptr)
    return invalid("dw_reader_open_images: null argument");
  return guarded([&] {
    *out = new dw_reader{open_image_dir(dir), {}};
    return DW_OK;
  });
}

dw_status dw_reader_next(dw_reader* reader, const double** values, size_t* p) {
  if (reader == nullptr || values == nullptr || p == nullptr)
    return invalid("dw_reader_next: null argument");
  return guarded([&] {
    std::optional<Observation> row = reader->impl->next();
    if (!row.has_value()) {
      *values = nullptr;
      *p = 0;
      return DW_OK;
    }
    reader->current = std::move(*row);
    *values = reader->current.data();
    *p = reader->current.size();
    return DW_OK;
  });
}

int dw_reader_yields_norms(const dw_reader* reader) {
  return (reader != nullptr && reader->impl->yields_norms()) ? 1 : 0;
}

void dw_reader_free(dw_reader* reader) { delete reader; }

dw_status dw_ic_study(const dw_limits* limits, const dw_dist* dist,
                      uint32_t replications, uint32_t max_windows, uint64_t seed,
                      dw_run_summary* out) {
  if (limits == nullptr || dist == nullptr || out == nullptr)
    return invalid("dw_ic_study: null argument");
  return guarded([&] {
    const RunLengthSummary summary =
        ic_study(limits->impl, dist->impl, static_cast<int>(replications),
                 static_cast<int>(max_windows), seed);
    fill_summary(summary, out);
    return DW_OK;
  });
}

dw_status dw_ooc_study(const dw_limits* limits, const dw_scenario* scenario,
                       uint32_t replications, uint32_t horizon, uint64_t seed,
                       dw_run_summary* out) {
  if (limits == nullptr || scenario == nullptr || out == nullptr)
    return invalid("dw_ooc_study: null argument");
  return guarded([&] {
    const RunLengthSummary summary =
        ooc_study(limits->impl, scenario->impl, static_cast<int>(replications),
                  static_cast<int>(horizon), seed);
    fill_summary(summary, out);
    return DW_OK;
  });
}

dw_status dw_sensitivity_run(const char* grid_path, uint32_t replications,
                             uint32_t horizon, uint64_t seed,
                             const char* out_csv) {
  if (grid_path == nullptr) return invalid("dw_sensitivity_run: null grid path");
  return guarded([&] {
    run_sensitivity_grid_file(grid_path, static_cast<int>(replications),
                              static_cast<int>(horizon), seed,
                              out_csv == nullptr ? std::string() : out_csv);
    return DW_OK;
  });
}

dw_status dw_l2_norm(const double* values, size_t p, double* out) {
  if (values == nullptr || out == nullptr) return invalid("dw_l2_norm: null argument");
  return guarded([&] {
    *out = l2_norm(std::span<const double>(values, p));
    return DW_OK;
  });
}

dw_status dw_weighted_precedence(const double* first, size_t n_first,
                                 const double* second, size_t n_second,
                                 double* out) {
  if (first == nullptr || second == nullptr || out == nullptr)
    return invalid("dw_weighted_precedence: null argument");
  return guarded([&] {
    *out = weighted_precedence(std::span<const double>(first, n_first),
                               std::span<const double>(second, n_second));
    return DW_OK;
  });
}

dw_status dw_partition_statistics(const double* window, size_t w, uint32_t l0,
                                  double* out) {
  if (window == nullptr || out == nullptr)
    return invalid("dw_partition_statistics: null argument");
  return guarded([&] {
    const WindowConfig cfg{static_cast<int>(w), static_cast<int>(l0)};
    validate(cfg);
    partition_statistics_into(
        std::span<const double>(window, w), cfg,
        std::span<double>(out, static_cast<std::size_t>(cfg.partition_count())));
    return DW_OK;
  });
}

dw_status dw_window_statistic(const double* parts, size_t n, double* out) {
  if (parts == nullptr || out == nullptr)
    return invalid("dw_window_statistic: null argument");
  return guarded([&] {
    *out = window_statistic(std::span<const double>(parts, n));
    return DW_OK;
  });
}

dw_status dw_quantile(const double* sample, size_t n, double q, double* out) {
  if (sample == nullptr || out == nullptr)
    return invalid("dw_quantile: null argument");
  return guarded([&] {
    *out = quantile(std::span<const double>(sample, n), q);
    return DW_OK;
  });
}

}  // extern "C"
