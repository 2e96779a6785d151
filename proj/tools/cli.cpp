#include "cli.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "driftwatch/driftwatch.h"

namespace dwcli {

namespace {

struct DwError {
  dw_status status;
  std::string message;
};

void check(dw_status status, const char* what) {
  if (status != DW_OK)
    throw DwError{status, std::string(what) + ": " + dw_last_error()};
}

// DRIFTWATCH_SEED in the environment overrides any --seed flag.
std::uint64_t effective_seed(std::uint64_t flag_seed) {
  const char* env = std::getenv("DRIFTWATCH_SEED");
  if (env == nullptr || *env == '\0') return flag_seed;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw DwError{DW_ERR_INVALID_ARGUMENT,
                  std::string("DRIFTWATCH_SEED is not an integer: ") + env};
  return static_cast<std::uint64_t>(value);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DwError{DW_ERR_IO, "cannot open " + path};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Distribution shortcuts for --source / --dist. "@file.json" passes a raw
// distribution document through.
std::string dist_json_for(const std::string& name, int p) {
  if (!name.empty() && name.front() == '@') return read_text_file(name.substr(1));
  const std::string dim = std::to_string(p);
  if (name == "uniform") return R"({"kind":"uniform_norms"})";
  if (name == "normal")
    return R"({"kind":"normal","p":)" + dim + R"(,"cov":{"kind":"structured","c0":0.5}})";
  if (name == "t5")
    return R"({"kind":"student_t","df":5.0,"p":)" + dim +
           R"(,"scale":{"kind":"structured","c0":0.5}})";
  if (name == "cauchy")
    return R"({"kind":"student_t","df":1.0,"p":)" + dim +
           R"(,"scale":{"kind":"structured","c0":0.5}})";
  if (name == "exponential-gaussian")
    return R"({"kind":"exponential_copula","p":)" + dim +
           R"(,"rates":1.0,"copula":{"kind":"gaussian","correlation":{"kind":"structured_standardized","c0":0.5}}})";
  if (name == "exponential-clayton")
    return R"({"kind":"exponential_copula","p":)" + dim +
           R"(,"rates":1.0,"copula":{"kind":"clayton","xi":1.0}})";
  throw DwError{DW_ERR_INVALID_ARGUMENT,
                "unknown distribution '" + name +
                    "' (expected uniform, normal, t5, cauchy, "
                    "exponential-gaussian, exponential-clayton, or @file.json)"};
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw DwError{DW_ERR_IO, "cannot write " + out_path};
  out << text;
}

std::string format_summary_csv(const char* kind, const std::string& label,
                               const dw_run_summary& s) {
  char buffer[256];
  std::ostringstream row;
  row << "kind,label,n_runs,horizon,arl,mrl,median_tau_hat,detection_rate,censored\n";
  std::snprintf(buffer, sizeof buffer, "%s,%s,%llu,%llu,%.17g,%.17g,", kind,
                label.c_str(), static_cast<unsigned long long>(s.n_runs),
                static_cast<unsigned long long>(s.horizon), s.arl, s.mrl);
  row << buffer;
  if (s.median_tau_hat == s.median_tau_hat)  // not NaN
    row << s.median_tau_hat;
  row << ',';
  if (s.detection_rate == s.detection_rate) row << s.detection_rate;
  row << ',' << s.censored << '\n';
  return row.str();
}

int cmd_calibrate(std::uint32_t w, std::uint32_t l0, double alpha,
                  std::uint32_t reps, std::uint32_t windows, std::uint64_t seed,
                  const std::string& source, int source_p,
                  const std::string& out_path) {
  dw_calibration_settings settings;
  dw_calibration_settings_init(&settings);
  settings.w = w;
  settings.l0 = l0;
  settings.alpha = alpha;
  settings.replications = reps;
  settings.sequence_length = windows + w - 1;
  settings.seed = effective_seed(seed);

  std::string source_json;
  if (source != "uniform") {
    source_json = dist_json_for(source, source_p);
    settings.source_json = source_json.c_str();
  }

  dw_limits* limits = nullptr;
  check(dw_calibrate(&settings, &limits), "calibrate");
  const dw_status save_status = dw_limits_save(limits, out_path.c_str());
  double h1 = 0.0;
  dw_limits_at(limits, 1, &h1);
  const std::uint32_t count = dw_limits_count(limits);
  const double tail = dw_limits_tail(limits);
  dw_limits_free(limits);
  check(save_status, "save limits");
  std::cout << "calibrated w=" << w << " l0=" << l0 << " alpha=" << alpha
            << " reps=" << reps << " seed=" << settings.seed << "\n"
            << "h_1=" << h1 << " estimated_through=" << count
            << " tail_limit=" << tail << " -> " << out_path << "\n";
  return 0;
}

int cmd_eval_ic(const std::string& limits_path, const std::string& dist, int p,
                std::uint32_t reps, std::uint32_t windows, std::uint64_t seed,
                const std::string& out_path) {
  dw_limits* limits = nullptr;
  check(dw_limits_load(limits_path.c_str(), &limits), "load limits");
  dw_dist* spec = nullptr;
  const std::uint64_t s = effective_seed(seed);
  dw_status status = dw_dist_parse(dist_json_for(dist, p).c_str(), s, &spec);
  if (status != DW_OK) {
    dw_limits_free(limits);
    check(status, "parse distribution");
  }
  if (windows == 0) windows = 2500 - dw_limits_w(limits) + 1;
  dw_run_summary summary;
  status = dw_ic_study(limits, spec, reps, windows, s, &summary);
  dw_dist_free(spec);
  dw_limits_free(limits);
  check(status, "ic study");
  emit(format_summary_csv("ic", dist, summary), out_path);
  return 0;
}

int cmd_eval_ooc(const std::string& limits_path, const std::string& scenario_path,
                 std::uint32_t reps, std::uint32_t horizon, std::uint64_t seed,
                 const std::string& out_path) {
  dw_limits* limits = nullptr;
  check(dw_limits_load(limits_path.c_str(), &limits), "load limits");
  const std::uint64_t s = effective_seed(seed);
  dw_scenario* scenario = nullptr;
  dw_status status = dw_scenario_load(scenario_path.c_str(), s, &scenario);
  if (status != DW_OK) {
    dw_limits_free(limits);
    check(status, "load scenario");
  }
  if (horizon == 0) horizon = 2500 - dw_limits_w(limits) + 1;
  dw_run_summary summary;
  status = dw_ooc_study(limits, scenario, reps, horizon, s, &summary);
  dw_scenario_free(scenario);
  dw_limits_free(limits);
  check(status, "ooc study");
  emit(format_summary_csv("ooc", scenario_path, summary), out_path);
  return 0;
}

int cmd_sensitivity(const std::string& grid_path, std::uint32_t reps,
                    std::uint32_t horizon, std::uint64_t seed,
                    const std::string& out_path) {
  check(dw_sensitivity_run(grid_path.c_str(), reps, horizon,
                           effective_seed(seed),
                           out_path.empty() ? nullptr : out_path.c_str()),
        "sensitivity");
  return 0;
}

int cmd_monitor(const std::string& limits_path, const std::string& input_csv,
                const std::string& images_dir, const std::string& norms_csv,
                bool has_header, bool restart, const std::string& out_path) {
  const int sources = (!input_csv.empty()) + (!images_dir.empty()) +
                      (!norms_csv.empty());
  if (sources != 1)
    throw DwError{DW_ERR_INVALID_ARGUMENT,
                  "monitor needs exactly one of --input, --images, --norms"};

  dw_limits* limits = nullptr;
  check(dw_limits_load(limits_path.c_str(), &limits), "load limits");

  dw_reader* reader = nullptr;
  dw_status status = DW_OK;
  if (!input_csv.empty())
    status = dw_reader_open_csv(input_csv.c_str(), has_header ? 1 : 0, &reader);
  else if (!images_dir.empty())
    status = dw_reader_open_images(images_dir.c_str(), &reader);
  else
    status = dw_reader_open_norms(norms_csv.c_str(), has_header ? 1 : 0, &reader);
  if (status != DW_OK) {
    dw_limits_free(limits);
    check(status, "open input");
  }

  dw_monitor* monitor = nullptr;
  status = dw_monitor_new(limits, restart ? 1 : 0, &monitor);
  if (status != DW_OK) {
    dw_reader_free(reader);
    dw_limits_free(limits);
    check(status, "create monitor");
  }

  bool any_signal = false;
  try {
    const bool norms = dw_reader_yields_norms(reader) != 0;
    for (;;) {
      const double* values = nullptr;
      size_t p = 0;
      check(dw_reader_next(reader, &values, &p), "read input");
      if (p == 0) break;
      dw_step step;
      if (norms)
        check(dw_monitor_push_norm(monitor, values[0], &step), "monitor");
      else
        check(dw_monitor_push_vector(monitor, values, p, &step), "monitor");
      if (step.kind == DW_STEP_SIGNAL) {
        any_signal = true;
        std::cout << "signal: window=" << step.window
                  << " statistic=" << step.statistic << " limit=" << step.limit
                  << " side=" << (step.side == DW_SIDE_LOWER ? "lower" : "upper")
                  << " partition_index=" << step.partition_index
                  << " tau_hat=" << step.tau_hat << "\n";
        if (!restart) break;
      }
    }
    if (!out_path.empty())
      check(dw_monitor_write_trace_csv(monitor, out_path.c_str()), "write trace");
  } catch (...) {
    dw_monitor_free(monitor);
    dw_reader_free(reader);
    dw_limits_free(limits);
    throw;
  }
  dw_monitor_free(monitor);
  dw_reader_free(reader);
  dw_limits_free(limits);
  return any_signal ? 2 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"driftwatch: distribution-free change-point monitoring for "
               "high-dimensional streams"};
  app.require_subcommand(1);

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Estimate window-indexed control limits by Monte Carlo");
  std::uint32_t w = 15, l0 = 3, reps = 10000, windows = 2486;
  double alpha = 0.004;
  std::uint64_t seed = 0;
  std::string source = "uniform";
  std::string out_path;
  calibrate->add_option("--w", w, "Window size");
  calibrate->add_option("--l0", l0, "Quarantine constant");
  calibrate->add_option("--alpha", alpha, "Per-window false-alarm rate");
  calibrate->add_option("--reps", reps, "Monte-Carlo streams");
  calibrate->add_option("--windows", windows, "Windows per simulated stream");
  calibrate->add_option("--seed", seed, "Seed (DRIFTWATCH_SEED overrides)");
  calibrate->add_option("--source", source,
                        "Calibration stream: uniform | normal | t5 | cauchy | "
                        "exponential-gaussian | exponential-clayton | @doc.json "
                        "(with ':p' dimension via --p for named laws)");
  std::int32_t source_p = 25;
  calibrate->add_option("--p", source_p, "Dimension for a named --source law");
  calibrate->add_option("--out", out_path, "Limits file to write")->required();

  // eval-ic
  auto* eval_ic = app.add_subcommand("eval-ic", "In-control run-length study");
  std::string limits_path, dist = "normal";
  std::int32_t p = 10;
  std::uint32_t ic_reps = 10000, ic_windows = 0;
  std::uint64_t ic_seed = 1;
  std::string ic_out;
  eval_ic->add_option("--limits", limits_path, "Limits file")->required();
  eval_ic->add_option("--dist", dist,
                      "uniform | normal | t5 | cauchy | exponential-gaussian | "
                      "exponential-clayton | @doc.json");
  eval_ic->add_option("--p", p, "Dimension for named laws");
  eval_ic->add_option("--reps", ic_reps, "Replicates");
  eval_ic->add_option("--windows", ic_windows,
                      "Censoring horizon in windows (0 = 2500-obs default)");
  eval_ic->add_option("--seed", ic_seed, "Seed (DRIFTWATCH_SEED overrides)");
  eval_ic->add_option("--out", ic_out, "Write the summary CSV here (default stdout)");

  // eval-ooc
  auto* eval_ooc = app.add_subcommand("eval-ooc", "Planted-change run-length study");
  std::string ooc_limits, scenario_path, ooc_out;
  std::uint32_t ooc_reps = 2000, horizon = 0;
  std::uint64_t ooc_seed = 1;
  eval_ooc->add_option("--limits", ooc_limits, "Limits file")->required();
  eval_ooc->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  eval_ooc->add_option("--reps", ooc_reps, "Replicates");
  eval_ooc->add_option("--horizon", horizon,
                       "Horizon in windows (0 = 2500-obs default)");
  eval_ooc->add_option("--seed", ooc_seed, "Seed (DRIFTWATCH_SEED overrides)");
  eval_ooc->add_option("--out", ooc_out, "Write the summary CSV here (default stdout)");

  // sensitivity
  auto* sensitivity = app.add_subcommand(
      "sensitivity", "Detection-rate table over a grid of configurations");
  std::string grid_path, grid_out;
  std::uint32_t grid_reps = 2000, grid_horizon = 0;
  std::uint64_t grid_seed = 1;
  sensitivity->add_option("--grid", grid_path, "Grid JSON")->required();
  sensitivity->add_option("--reps", grid_reps, "Replicates per cell");
  sensitivity->add_option("--horizon", grid_horizon,
                          "Horizon in windows (0 = 2500-obs default)");
  sensitivity->add_option("--seed", grid_seed, "Seed (DRIFTWATCH_SEED overrides)");
  sensitivity->add_option("--out", grid_out, "Write the CSV here (default stdout)");

  // monitor
  auto* monitor = app.add_subcommand("monitor", "Monitor a recorded stream");
  std::string mon_limits, input_csv, images_dir, norms_csv, trace_out;
  bool has_header = false, restart = false;
  monitor->add_option("--limits", mon_limits, "Limits file")->required();
  monitor->add_option("--input", input_csv, "CSV of observation vectors");
  monitor->add_option("--images", images_dir, "Directory of .pgm graymaps");
  monitor->add_option("--norms", norms_csv, "CSV with one norm column");
  monitor->add_flag("--header", has_header, "Skip one header row in CSV input");
  monitor->add_flag("--restart", restart, "Keep monitoring after a signal");
  monitor->add_option("--out", trace_out, "Trace CSV to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (calibrate->parsed())
      return cmd_calibrate(w, l0, alpha, reps, windows, seed, source, source_p,
                           out_path);
    if (eval_ic->parsed())
      return cmd_eval_ic(limits_path, dist, p, ic_reps, ic_windows, ic_seed, ic_out);
    if (eval_ooc->parsed())
      return cmd_eval_ooc(ooc_limits, scenario_path, ooc_reps, horizon, ooc_seed,
                          ooc_out);
    if (sensitivity->parsed())
      return cmd_sensitivity(grid_path, grid_reps, grid_horizon, grid_seed, grid_out);
    if (monitor->parsed())
      return cmd_monitor(mon_limits, input_csv, images_dir, norms_csv, has_header,
                         restart, trace_out);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const DwError& e) {
    std::cerr << "error: " << e.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dwcli
