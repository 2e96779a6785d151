#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace driftwatch {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  fail(ErrorCode::Parse, where + ": " + what);
}

std::string line_ref(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

double parse_field(const std::string& field, const std::string& where) {
  std::size_t begin = field.find_first_not_of(" \t\r");
  if (begin == std::string::npos) parse_fail(where, "empty field");
  std::size_t end = field.find_last_not_of(" \t\r") + 1;
  double value = 0.0;
  const char* first = field.data() + begin;
  const char* last = field.data() + end;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    parse_fail(where, "not a number: '" + field.substr(begin, end - begin) + "'");
  if (!std::isfinite(value)) parse_fail(where, "non-finite value");
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

class CsvReader final : public ObservationReader {
 public:
  CsvReader(std::string path, bool has_header, bool norm_column)
      : path_(std::move(path)), norm_column_(norm_column) {
    stream_.open(path_);
    if (!stream_) fail(ErrorCode::Io, "cannot open " + path_);
    if (has_header) {
      std::string header;
      if (std::getline(stream_, header)) ++line_;
    }
  }

  std::optional<Observation> next() override {
    std::string line;
    for (;;) {
      if (!std::getline(stream_, line)) return std::nullopt;
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) break;
      // A blank line is only tolerable as trailing whitespace at EOF.
      if (stream_.peek() != std::ifstream::traits_type::eof())
        parse_fail(line_ref(path_, line_), "blank line inside data");
      return std::nullopt;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (norm_column_ && fields.size() != 1)
      parse_fail(line_ref(path_, line_), "expected a single norm column, got " +
                                             std::to_string(fields.size()) +
                                             " fields");
    if (width_ == 0) {
      width_ = fields.size();
    } else if (fields.size() != width_) {
      parse_fail(line_ref(path_, line_),
                 "expected " + std::to_string(width_) + " fields, got " +
                     std::to_string(fields.size()));
    }
    Observation row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row[i] = parse_field(fields[i], line_ref(path_, line_));
      if (norm_column_ && row[i] < 0.0)
        parse_fail(line_ref(path_, line_), "norm values must be >= 0");
    }
    return row;
  }

  bool yields_norms() const override { return norm_column_; }

 private:
  std::string path_;
  std::ifstream stream_;
  bool norm_column_ = false;
  std::size_t width_ = 0;
  std::size_t line_ = 0;
};

// --- portable graymap ------------------------------------------------------

int pgm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments, then reads one nonnegative integer.
  for (;;) {
    const int c = in.peek();
    if (c == std::ifstream::traits_type::eof())
      parse_fail(path, "unexpected end of graymap header");
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    break;
  }
  long long value = 0;
  bool digits = false;
  for (;;) {
    const int c = in.peek();
    if (c < '0' || c > '9') break;
    in.get();
    value = value * 10 + (c - '0');
    digits = true;
    if (value > 1'000'000'000) parse_fail(path, "graymap header value too large");
  }
  if (!digits) parse_fail(path, "malformed graymap header");
  return static_cast<int>(value);
}

Observation read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
    parse_fail(path, "not a P2/P5 portable graymap");
  const bool raw = magic[1] == '5';
  const int width = pgm_token(in, path);
  const int height = pgm_token(in, path);
  const int maxval = pgm_token(in, path);
  if (width <= 0 || height <= 0) parse_fail(path, "bad graymap dimensions");
  if (maxval < 1 || maxval > 255)
    parse_fail(path, "maxval " + std::to_string(maxval) +
                         " unsupported (pixel range is 0..255)");
  const std::size_t count =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  Observation pixels(count);
  if (raw) {
    in.get();  // single whitespace byte after maxval
    std::vector<unsigned char> bytes(count);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
      parse_fail(path, "truncated pixel data");
    for (std::size_t i = 0; i < count; ++i) {
      if (bytes[i] > maxval) parse_fail(path, "pixel exceeds maxval");
      pixels[i] = static_cast<double>(bytes[i]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const int v = pgm_token(in, path);
      if (v > maxval) parse_fail(path, "pixel exceeds maxval");
      pixels[i] = static_cast<double>(v);
    }
  }
  return pixels;
}

class ImageDirReader final : public ObservationReader {
 public:
  explicit ImageDirReader(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
      fail(ErrorCode::Io, "not a directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (ext == ".pgm") files_.push_back(entry.path().string());
    }
    if (files_.empty()) fail(ErrorCode::Io, "no .pgm files in " + dir);
    std::sort(files_.begin(), files_.end());
  }

  std::optional<Observation> next() override {
    if (index_ >= files_.size()) return std::nullopt;
    const std::string& path = files_[index_++];
    Observation pixels = read_pgm(path);
    if (dimension_ == 0) {
      dimension_ = pixels.size();
    } else if (pixels.size() != dimension_) {
      parse_fail(path, "image dimension " + std::to_string(pixels.size()) +
                           " differs from the stream's " +
                           std::to_string(dimension_));
    }
    return pixels;
  }

 private:
  std::vector<std::string> files_;
  std::size_t index_ = 0;
  std::size_t dimension_ = 0;
};

// --- limits file ------------------------------------------------------------

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_fail(path, e.what());
  }
}

const json& require_key(const json& doc, const char* key,
                        const std::string& where) {
  const auto it = doc.find(key);
  if (it == doc.end())
    fail(ErrorCode::Validation, where + ": missing key '" + key + "'");
  return *it;
}

double require_number(const json& doc, const char* key, const std::string& where) {
  const json& v = require_key(doc, key, where);
  if (!v.is_number())
    fail(ErrorCode::Validation, where + ": key '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t require_integer(const json& doc, const char* key,
                             const std::string& where) {
  const json& v = require_key(doc, key, where);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(ErrorCode::Validation, where + ": key '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

void validate_limit_value(double h, const std::string& where) {
  if (!(h >= 0.5) || !(h <= 1.0))
    fail(ErrorCode::Validation,
         where + ": limit " + std::to_string(h) + " outside [0.5, 1]");
}

}  // namespace

std::unique_ptr<ObservationReader> open_csv(const std::string& path,
                                            bool has_header) {
  return std::make_unique<CsvReader>(path, has_header, false);
}

std::unique_ptr<ObservationReader> open_norm_column(const std::string& path,
                                                    bool has_header) {
  return std::make_unique<CsvReader>(path, has_header, true);
}

std::unique_ptr<ObservationReader> open_image_dir(const std::string& path) {
  return std::make_unique<ImageDirReader>(path);
}

void write_limits(const ControlLimits& limits, const std::string& path) {
  ordered_json doc;
  doc["format_version"] = 1;
  doc["alpha"] = limits.alpha;
  doc["w"] = limits.cfg.w;
  doc["l0"] = limits.cfg.l0;
  doc["limits"] = limits.limits;
  doc["tail_limit"] = limits.tail_limit;
  doc["estimated_through"] = limits.estimated_through;
  doc["replications"] = limits.replications;
  doc["survivor_floor"] = limits.survivor_floor;
  doc["seed"] = limits.seed;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << doc.dump(1) << "\n";
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

ControlLimits read_limits(const std::string& path) {
  const json doc = load_json_file(path);
  if (!doc.is_object())
    fail(ErrorCode::Validation, path + ": limits file must be a JSON object");
  const std::int64_t version = require_integer(doc, "format_version", path);
  if (version != 1)
    fail(ErrorCode::Validation, path + ": unsupported format_version " +
                                    std::to_string(version));
  ControlLimits limits;
  limits.alpha = require_number(doc, "alpha", path);
  limits.cfg.w = static_cast<int>(require_integer(doc, "w", path));
  limits.cfg.l0 = static_cast<int>(require_integer(doc, "l0", path));
  validate(limits.cfg);
  if (!(limits.alpha > 0.0) || !(limits.alpha < 0.5))
    fail(ErrorCode::Validation, path + ": alpha outside (0, 0.5)");
  const json& array = require_key(doc, "limits", path);
  if (!array.is_array() || array.empty())
    fail(ErrorCode::Validation, path + ": 'limits' must be a nonempty array");
  limits.limits.reserve(array.size());
  for (const json& v : array) {
    if (!v.is_number())
      fail(ErrorCode::Validation, path + ": limits entries must be numbers");
    const double h = v.get<double>();
    validate_limit_value(h, path);
    limits.limits.push_back(h);
  }
  limits.tail_limit = require_number(doc, "tail_limit", path);
  validate_limit_value(limits.tail_limit, path);
  limits.estimated_through =
      static_cast<int>(require_integer(doc, "estimated_through", path));
  if (limits.estimated_through != static_cast<int>(limits.limits.size()))
    fail(ErrorCode::Validation,
         path + ": estimated_through does not match the limits array length");
  limits.replications = static_cast<int>(require_integer(doc, "replications", path));
  limits.survivor_floor =
      static_cast<int>(require_integer(doc, "survivor_floor", path));
  limits.seed = require_key(doc, "seed", path).get<std::uint64_t>();
  return limits;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << "window,statistic,limit,signal,tau_hat\n";
  char buffer[64];
  for (const TraceRow& row : trace) {
    out << row.window << ',';
    std::snprintf(buffer, sizeof buffer, "%.17g", row.statistic);
    out << buffer << ',';
    std::snprintf(buffer, sizeof buffer, "%.17g", row.limit);
    out << buffer << ',' << (row.signaled ? 1 : 0) << ',';
    if (row.signaled) out << row.tau_hat;
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

namespace {

// Counter-keyed resolution keeps every random recipe in a document on its own
// substream, so re-parsing a document always yields the same matrices.
struct ResolveContext {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;
};

std::vector<double> broadcast_vector(const json& value, int p, const char* key,
                                     const std::string& where) {
  std::vector<double> out;
  if (value.is_number()) {
    out.assign(static_cast<std::size_t>(p), value.get<double>());
  } else if (value.is_array()) {
    if (static_cast<int>(value.size()) != p)
      fail(ErrorCode::Validation, where + ": '" + key + "' has length " +
                                      std::to_string(value.size()) +
                                      " but p is " + std::to_string(p));
    for (const json& v : value) {
      if (!v.is_number())
        fail(ErrorCode::Validation,
             where + ": '" + key + "' entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else {
    fail(ErrorCode::Validation,
         where + ": '" + key + "' must be a number or an array");
  }
  return out;
}

Matrix matrix_from_json(const json& entries, const std::string& where) {
  if (!entries.is_array() || entries.empty())
    fail(ErrorCode::Validation, where + ": 'entries' must be a nonempty array");
  const std::size_t p = entries.size();
  Matrix m(p);
  for (std::size_t i = 0; i < p; ++i) {
    const json& row = entries[i];
    if (!row.is_array() || row.size() != p)
      fail(ErrorCode::Validation, where + ": 'entries' must be a square matrix");
    for (std::size_t j = 0; j < p; ++j) {
      if (!row[j].is_number())
        fail(ErrorCode::Validation, where + ": matrix entries must be numbers");
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

CovarianceMatrix parse_covariance(const json& doc, int p, ResolveContext& ctx,
                                  const std::string& where) {
  if (!doc.is_object())
    fail(ErrorCode::Validation, where + ": covariance must be an object");
  const std::string kind = require_key(doc, "kind", where).get<std::string>();
  if (kind == "structured") {
    const double c0 = doc.contains("c0") ? require_number(doc, "c0", where) : 0.5;
    return covariance_structured(p, c0);
  }
  if (kind == "identity") {
    return CovarianceMatrix{Matrix::identity(static_cast<std::size_t>(p))};
  }
  if (kind == "random") {
    RandomCovarianceSpec spec;
    spec.p = p;
    spec.var_lo = require_number(doc, "var_lo", where);
    spec.var_hi = require_number(doc, "var_hi", where);
    spec.alpha_d =
        doc.contains("alpha_d") ? require_number(doc, "alpha_d", where) : 1.5;
    RngStream rng(ctx.seed, ctx.counter++);
    return random_pd_covariance(spec, rng);
  }
  if (kind == "matrix") {
    Matrix m = matrix_from_json(require_key(doc, "entries", where), where);
    if (static_cast<int>(m.size()) != p)
      fail(ErrorCode::Validation, where + ": matrix dimension " +
                                      std::to_string(m.size()) +
                                      " does not match p=" + std::to_string(p));
    return CovarianceMatrix{std::move(m)};
  }
  fail(ErrorCode::Validation, where + ": unknown covariance kind '" + kind + "'");
}

CorrelationMatrix parse_correlation(const json& doc, int p, ResolveContext& ctx,
                                    const std::string& where) {
  if (!doc.is_object())
    fail(ErrorCode::Validation, where + ": correlation must be an object");
  const std::string kind = require_key(doc, "kind", where).get<std::string>();
  if (kind == "structured_standardized") {
    const double c0 = doc.contains("c0") ? require_number(doc, "c0", where) : 0.5;
    return correlation_from_covariance(covariance_structured(p, c0));
  }
  if (kind == "identity") {
    return CorrelationMatrix{Matrix::identity(static_cast<std::size_t>(p))};
  }
  if (kind == "random") {
    const double alpha_d =
        doc.contains("alpha_d") ? require_number(doc, "alpha_d", where) : 1.5;
    RngStream rng(ctx.seed, ctx.counter++);
    return random_correlation(p, alpha_d, rng);
  }
  if (kind == "matrix") {
    Matrix m = matrix_from_json(require_key(doc, "entries", where), where);
    if (static_cast<int>(m.size()) != p)
      fail(ErrorCode::Validation, where + ": matrix dimension does not match p");
    return CorrelationMatrix{std::move(m)};
  }
  fail(ErrorCode::Validation, where + ": unknown correlation kind '" + kind + "'");
}

DistributionSpec parse_distribution(const json& doc, ResolveContext& ctx,
                                    const std::string& where) {
  if (!doc.is_object())
    fail(ErrorCode::Validation, where + ": distribution must be an object");
  const std::string kind = require_key(doc, "kind", where).get<std::string>();
  if (kind == "uniform_norms") return UniformNormsSpec{};

  const int p = static_cast<int>(require_integer(doc, "p", where));
  if (p < 1) fail(ErrorCode::Validation, where + ": p must be >= 1");

  if (kind == "normal") {
    NormalSpec spec;
    spec.cov = parse_covariance(require_key(doc, "cov", where), p, ctx, where);
    spec.mean = doc.contains("mean")
                    ? broadcast_vector(doc["mean"], p, "mean", where)
                    : std::vector<double>(static_cast<std::size_t>(p), 0.0);
    return spec;
  }
  if (kind == "student_t") {
    StudentTSpec spec;
    spec.df = require_number(doc, "df", where);
    spec.scale = parse_covariance(require_key(doc, "scale", where), p, ctx, where);
    return spec;
  }
  if (kind == "exponential_copula") {
    ExponentialCopulaSpec spec;
    spec.rates = doc.contains("rates")
                     ? broadcast_vector(doc["rates"], p, "rates", where)
                     : std::vector<double>(static_cast<std::size_t>(p), 1.0);
    const json& cop = require_key(doc, "copula", where);
    const std::string cop_kind = require_key(cop, "kind", where).get<std::string>();
    if (cop_kind == "gaussian") {
      GaussianCopula gc;
      gc.corr = parse_correlation(require_key(cop, "correlation", where), p, ctx,
                                  where);
      spec.copula = std::move(gc);
    } else if (cop_kind == "clayton") {
      ClaytonCopula cc;
      cc.xi = require_number(cop, "xi", where);
      spec.copula = cc;
    } else {
      fail(ErrorCode::Validation, where + ": unknown copula kind '" + cop_kind + "'");
    }
    return spec;
  }
  fail(ErrorCode::Validation, where + ": unknown distribution kind '" + kind + "'");
}

}  // namespace

DistributionSpec parse_distribution_json(const std::string& json_text,
                                         std::uint64_t resolve_seed) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    parse_fail("distribution", e.what());
  }
  ResolveContext ctx{resolve_seed, 0};
  return parse_distribution(doc, ctx, "distribution");
}

ChangeScenario read_scenario_file(const std::string& path,
                                  std::uint64_t resolve_seed) {
  const json doc = load_json_file(path);
  if (!doc.is_object())
    fail(ErrorCode::Validation, path + ": scenario file must be a JSON object");
  ChangeScenario scenario;
  const std::int64_t tau = require_integer(doc, "tau", path);
  if (tau < 1) fail(ErrorCode::Validation, path + ": tau must be >= 1");
  scenario.tau = static_cast<std::uint64_t>(tau);
  ResolveContext ctx{resolve_seed, 0};
  scenario.ic = parse_distribution(require_key(doc, "ic", path), ctx, path);
  scenario.ooc = parse_distribution(require_key(doc, "ooc", path), ctx, path);
  validate(scenario);
  return scenario;
}

std::string sensitivity_rows_to_csv(const std::vector<SensitivityRow>& rows) {
  std::ostringstream out;
  char buffer[64];
  out << "label,w,l0,tau,detection_rate,mrl1,median_tau_hat,censored\n";
  for (const SensitivityRow& row : rows) {
    out << row.label << ',' << row.w << ',' << row.l0 << ',' << row.tau << ',';
    std::snprintf(buffer, sizeof buffer, "%.17g", row.detection_rate);
    out << buffer << ',';
    std::snprintf(buffer, sizeof buffer, "%.17g", row.mrl1);
    out << buffer << ',';
    std::snprintf(buffer, sizeof buffer, "%.17g", row.median_tau_hat);
    out << buffer << ',' << row.censored << '\n';
  }
  return out.str();
}

void run_sensitivity_grid_file(const std::string& grid_path, int replications,
                               int horizon, std::uint64_t seed,
                               const std::string& out_csv) {
  namespace fs = std::filesystem;
  const json doc = load_json_file(grid_path);
  if (!doc.is_object())
    fail(ErrorCode::Validation, grid_path + ": grid file must be a JSON object");
  const json& cells = require_key(doc, "cells", grid_path);
  if (!cells.is_array() || cells.empty())
    fail(ErrorCode::Validation, grid_path + ": 'cells' must be a nonempty array");

  const fs::path base = fs::path(grid_path).parent_path();
  std::vector<SensitivityCell> built_cells;
  built_cells.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const json& cell = cells[c];
    const std::string where = grid_path + " cell " + std::to_string(c);
    SensitivityCell built;
    built.label = cell.contains("label") ? cell["label"].get<std::string>()
                                         : "cell_" + std::to_string(c);
    const std::string limits_rel =
        require_key(cell, "limits", where).get<std::string>();
    const fs::path limits_path = fs::path(limits_rel).is_absolute()
                                     ? fs::path(limits_rel)
                                     : base / limits_rel;
    built.limits = read_limits(limits_path.string());
    if (cell.contains("w") &&
        require_integer(cell, "w", where) != built.limits.cfg.w)
      fail(ErrorCode::Validation, where + ": cell w does not match limits file");
    if (cell.contains("l0") &&
        require_integer(cell, "l0", where) != built.limits.cfg.l0)
      fail(ErrorCode::Validation, where + ": cell l0 does not match limits file");
    ResolveContext ctx{seed + 1000003ULL * c, 0};
    const json& scen = require_key(cell, "scenario", where);
    const std::int64_t tau = require_integer(scen, "tau", where);
    if (tau < 1) fail(ErrorCode::Validation, where + ": tau must be >= 1");
    built.scenario.tau = static_cast<std::uint64_t>(tau);
    built.scenario.ic = parse_distribution(require_key(scen, "ic", where), ctx, where);
    built.scenario.ooc =
        parse_distribution(require_key(scen, "ooc", where), ctx, where);
    validate(built.scenario);
    built_cells.push_back(std::move(built));
  }

  const std::vector<SensitivityRow> rows =
      sensitivity_grid(built_cells, replications, horizon, seed);
  const std::string csv = sensitivity_rows_to_csv(rows);
  if (out_csv.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_csv);
    if (!out) fail(ErrorCode::Io, "cannot write " + out_csv);
    out << csv;
    if (!out) fail(ErrorCode::Io, "write failed for " + out_csv);
  }
}

}  // namespace driftwatch
