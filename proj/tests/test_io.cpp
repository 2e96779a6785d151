#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "calibration.hpp"
#include "error.hpp"
#include "io.hpp"
#include "monitor.hpp"

using namespace driftwatch;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "driftwatch_io_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;  // unreachable in these tests
}

}  // namespace

TEST_CASE("csv rows become observations") {
  const auto path = write_file("ok.csv", "1,2\n3,4\n");
  auto reader = open_csv(path.string(), false);
  CHECK_FALSE(reader->yields_norms());
  auto first = reader->next();
  REQUIRE(first.has_value());
  CHECK(*first == Observation{1.0, 2.0});
  auto second = reader->next();
  REQUIRE(second.has_value());
  CHECK(*second == Observation{3.0, 4.0});
  CHECK_FALSE(reader->next().has_value());
}

TEST_CASE("csv header flag skips one row") {
  const auto path = write_file("hdr.csv", "x,y\n1,2\n");
  auto reader = open_csv(path.string(), true);
  auto row = reader->next();
  REQUIRE(row.has_value());
  CHECK(*row == Observation{1.0, 2.0});
  CHECK_FALSE(reader->next().has_value());
}

TEST_CASE("ragged and malformed csv rows fail with the line number") {
  const auto ragged = write_file("ragged.csv", "1,2\n3\n");
  auto reader = open_csv(ragged.string(), false);
  reader->next();
  bool failed = false;
  try {
    reader->next();
  } catch (const Error& e) {
    failed = true;
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  CHECK(failed);

  const auto alpha = write_file("alpha.csv", "1,2\n3,zebra\n");
  auto reader2 = open_csv(alpha.string(), false);
  reader2->next();
  CHECK_THROWS_AS(reader2->next(), Error);

  const auto inf = write_file("inf.csv", "inf,2\n");
  auto reader3 = open_csv(inf.string(), false);
  CHECK_THROWS_AS(reader3->next(), Error);

  CHECK_THROWS_AS(open_csv((scratch_dir() / "missing.csv").string(), false), Error);
}

TEST_CASE("norm column readers validate sign and width") {
  const auto path = write_file("norms.csv", "0.5\n1.5\n0\n");
  auto reader = open_norm_column(path.string(), false);
  CHECK(reader->yields_norms());
  CHECK((*reader->next())[0] == 0.5);
  CHECK((*reader->next())[0] == 1.5);
  CHECK((*reader->next())[0] == 0.0);

  const auto negative = write_file("neg.csv", "-0.5\n");
  auto bad = open_norm_column(negative.string(), false);
  CHECK_THROWS_AS(bad->next(), Error);

  const auto wide = write_file("wide.csv", "1,2\n");
  auto wide_reader = open_norm_column(wide.string(), false);
  CHECK_THROWS_AS(wide_reader->next(), Error);
}

TEST_CASE("raw graymap pixels map row-major onto an observation") {
  const std::string header = "P5\n# fixture\n2 2\n255\n";
  std::string content = header;
  const unsigned char pixels[4] = {0, 128, 255, 64};
  content.append(reinterpret_cast<const char*>(pixels), 4);
  write_file("img_a.pgm", content);

  auto reader = open_image_dir(scratch_dir().string());
  auto obs = reader->next();
  REQUIRE(obs.has_value());
  CHECK(*obs == Observation{0.0, 128.0, 255.0, 64.0});
}

TEST_CASE("ascii graymaps, lexicographic order, and dimension checks") {
  const fs::path dir = scratch_dir() / "imgs";
  fs::create_directories(dir);
  std::ofstream(dir / "b.pgm") << "P2\n2 2\n255\n0 10\n20 30\n";
  std::ofstream(dir / "a.pgm") << "P2\n# comment\n2 2\n255\n1 2\n3 4\n";
  auto reader = open_image_dir(dir.string());
  auto first = reader->next();
  REQUIRE(first.has_value());
  CHECK(*first == Observation{1.0, 2.0, 3.0, 4.0});  // a.pgm sorts first
  auto second = reader->next();
  REQUIRE(second.has_value());
  CHECK(*second == Observation{0.0, 10.0, 20.0, 30.0});
  CHECK_FALSE(reader->next().has_value());

  std::ofstream(dir / "c.pgm") << "P2\n3 1\n255\n1 2 3\n";
  auto mismatched = open_image_dir(dir.string());
  mismatched->next();
  mismatched->next();
  CHECK_THROWS_AS(mismatched->next(), Error);  // c.pgm has a different size
}

TEST_CASE("graymap format errors") {
  const fs::path dir = scratch_dir() / "badimgs";
  fs::create_directories(dir);
  std::ofstream(dir / "bad_magic.pgm") << "P6\n2 2\n255\n";
  CHECK_THROWS_AS(open_image_dir(dir.string())->next(), Error);
  fs::remove(dir / "bad_magic.pgm");

  std::ofstream(dir / "big_maxval.pgm") << "P2\n2 2\n65535\n1 2 3 4\n";
  CHECK_THROWS_AS(open_image_dir(dir.string())->next(), Error);
  fs::remove(dir / "big_maxval.pgm");

  std::ofstream(dir / "truncated.pgm", std::ios::binary) << "P5\n2 2\n255\nab";
  CHECK_THROWS_AS(open_image_dir(dir.string())->next(), Error);
  fs::remove(dir / "truncated.pgm");

  CHECK_THROWS_AS(open_image_dir((scratch_dir() / "no_such_dir").string()), Error);
}

TEST_CASE("limits files round-trip bit for bit") {
  CalibrationSettings settings;
  settings.cfg = {15, 3};
  settings.replications = 500;
  settings.survivor_floor = 100;
  settings.sequence_length = 200;
  settings.seed = 4242;
  const ControlLimits limits = calibrate(settings).limits;

  const fs::path path = scratch_dir() / "limits.json";
  write_limits(limits, path.string());
  const ControlLimits loaded = read_limits(path.string());
  CHECK(loaded.limits == limits.limits);
  CHECK(loaded.tail_limit == limits.tail_limit);
  CHECK(loaded.alpha == limits.alpha);
  CHECK(loaded.cfg == limits.cfg);
  CHECK(loaded.estimated_through == limits.estimated_through);
  CHECK(loaded.replications == limits.replications);
  CHECK(loaded.survivor_floor == limits.survivor_floor);
  CHECK(loaded.seed == limits.seed);
}

TEST_CASE("limits file validation errors") {
  const auto version2 = write_file(
      "v2.json",
      R"({"format_version":2,"alpha":0.004,"w":15,"l0":3,"limits":[0.9],)"
      R"("tail_limit":0.9,"estimated_through":1,"replications":10,)"
      R"("survivor_floor":10,"seed":0})");
  CHECK(code_of([&] { read_limits(version2.string()); }) == ErrorCode::Validation);

  const auto out_of_range = write_file(
      "range.json",
      R"({"format_version":1,"alpha":0.004,"w":15,"l0":3,"limits":[1.2],)"
      R"("tail_limit":0.9,"estimated_through":1,"replications":10,)"
      R"("survivor_floor":10,"seed":0})");
  CHECK(code_of([&] { read_limits(out_of_range.string()); }) ==
        ErrorCode::Validation);

  const auto missing = write_file(
      "missing.json",
      R"({"format_version":1,"alpha":0.004,"w":15,"l0":3,"limits":[0.9],)"
      R"("tail_limit":0.9,"estimated_through":1,"replications":10,)"
      R"("survivor_floor":10})");
  CHECK(code_of([&] { read_limits(missing.string()); }) == ErrorCode::Validation);

  const auto mismatch = write_file(
      "mismatch.json",
      R"({"format_version":1,"alpha":0.004,"w":15,"l0":3,"limits":[0.9,0.9],)"
      R"("tail_limit":0.9,"estimated_through":1,"replications":10,)"
      R"("survivor_floor":10,"seed":0})");
  CHECK(code_of([&] { read_limits(mismatch.string()); }) == ErrorCode::Validation);

  const auto garbage = write_file("garbage.json", "{not json");
  CHECK(code_of([&] { read_limits(garbage.string()); }) == ErrorCode::Parse);
}

TEST_CASE("trace csv layout") {
  std::vector<TraceRow> trace;
  trace.push_back({1, 0.75, 0.9259, false, 0});
  trace.push_back({2, 0.9375, 0.9, true, 9});
  const fs::path path = scratch_dir() / "trace.csv";
  write_trace_csv(trace, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "window,statistic,limit,signal,tau_hat");
  std::getline(in, line);
  CHECK(line == "1,0.75,0.92589999999999995,0,");
  std::getline(in, line);
  CHECK(line == "2,0.9375,0.90000000000000002,1,9");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("distribution documents cover the experiment vocabulary") {
  const auto normal = parse_distribution_json(
      R"({"kind":"normal","p":4,"cov":{"kind":"structured","c0":0.5}})", 1);
  CHECK(std::holds_alternative<NormalSpec>(normal));
  CHECK(std::get<NormalSpec>(normal).mean == std::vector<double>(4, 0.0));

  const auto shifted = parse_distribution_json(
      R"({"kind":"normal","p":3,"mean":1.5,"cov":{"kind":"identity"}})", 1);
  CHECK(std::get<NormalSpec>(shifted).mean == std::vector<double>(3, 1.5));

  const auto cauchy = parse_distribution_json(
      R"({"kind":"student_t","df":1.0,"p":3,"scale":{"kind":"structured"}})", 1);
  CHECK(std::get<StudentTSpec>(cauchy).df == 1.0);

  const auto clayton = parse_distribution_json(
      R"({"kind":"exponential_copula","p":5,"rates":2.0,)"
      R"("copula":{"kind":"clayton","xi":1.0}})",
      1);
  CHECK(std::get<ExponentialCopulaSpec>(clayton).rates ==
        std::vector<double>(5, 2.0));

  const auto uniform = parse_distribution_json(R"({"kind":"uniform_norms"})", 1);
  CHECK(std::holds_alternative<UniformNormsSpec>(uniform));

  CHECK(code_of([] {
          parse_distribution_json(R"({"kind":"normal","p":3,)"
                                  R"("mean":[1,2],"cov":{"kind":"identity"}})",
                                  1);
        }) == ErrorCode::Validation);
  CHECK(code_of([] { parse_distribution_json("{", 1); }) == ErrorCode::Parse);
  CHECK(code_of([] {
          parse_distribution_json(R"({"kind":"weibull","p":2})", 1);
        }) == ErrorCode::Validation);
}

TEST_CASE("random covariance recipes resolve deterministically per seed") {
  const std::string doc =
      R"({"kind":"normal","p":4,"cov":)"
      R"({"kind":"random","var_lo":0.1,"var_hi":0.5,"alpha_d":1.5}})";
  const auto a = parse_distribution_json(doc, 99);
  const auto b = parse_distribution_json(doc, 99);
  const auto c = parse_distribution_json(doc, 100);
  CHECK(std::get<NormalSpec>(a).cov.entries == std::get<NormalSpec>(b).cov.entries);
  CHECK(std::get<NormalSpec>(a).cov.entries != std::get<NormalSpec>(c).cov.entries);
  for (int i = 0; i < 4; ++i) {
    const double v = std::get<NormalSpec>(a).cov.entries(i, i);
    CHECK(v >= 0.1);
    CHECK(v <= 0.5);
  }
}

TEST_CASE("scenario files parse and validate") {
  const auto path = write_file("scenario.json", R"({
    "tau": 10,
    "ic": {"kind":"exponential_copula","p":4,"rates":1.0,
           "copula":{"kind":"gaussian",
                     "correlation":{"kind":"structured_standardized","c0":0.5}}},
    "ooc": {"kind":"exponential_copula","p":4,"rates":3.0,
            "copula":{"kind":"clayton","xi":2.0}}
  })");
  const ChangeScenario scenario = read_scenario_file(path.string(), 5);
  CHECK(scenario.tau == 10);
  CHECK(std::holds_alternative<ExponentialCopulaSpec>(scenario.ic));
  CHECK(std::holds_alternative<ExponentialCopulaSpec>(scenario.ooc));

  const auto bad_tau = write_file("badtau.json",
                                  R"({"tau":0,"ic":{"kind":"uniform_norms"},)"
                                  R"("ooc":{"kind":"uniform_norms"}})");
  CHECK(code_of([&] { read_scenario_file(bad_tau.string(), 5); }) ==
        ErrorCode::Validation);
}

TEST_CASE("sensitivity grid file runs end to end") {
  CalibrationSettings settings;
  settings.cfg = {15, 3};
  settings.replications = 2000;
  settings.survivor_floor = 100;
  settings.sequence_length = 400;
  settings.seed = 17;
  const fs::path dir = scratch_dir() / "grid";
  fs::create_directories(dir);
  write_limits(calibrate(settings).limits, (dir / "limits.json").string());

  std::ofstream(dir / "grid.json") << R"({
    "cells": [
      {"label": "shift", "w": 15, "l0": 3, "limits": "limits.json",
       "scenario": {"tau": 30,
                    "ic": {"kind":"normal","p":4,"cov":{"kind":"identity"}},
                    "ooc": {"kind":"normal","p":4,"mean":4.0,
                            "cov":{"kind":"identity"}}}}
    ]
  })";
  const fs::path out = dir / "rows.csv";
  run_sensitivity_grid_file((dir / "grid.json").string(), 1000, 200, 21,
                            out.string());
  std::ifstream in(out);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "label,w,l0,tau,detection_rate,mrl1,median_tau_hat,censored");
  REQUIRE(std::getline(in, row));
  CHECK(row.substr(0, 11) == "shift,15,3,");

  // mismatched cell config is rejected
  std::ofstream(dir / "bad.json") << R"({
    "cells": [{"label":"x","w":17,"l0":3,"limits":"limits.json",
               "scenario":{"tau":5,
                           "ic":{"kind":"uniform_norms"},
                           "ooc":{"kind":"uniform_norms"}}}]
  })";
  CHECK(code_of([&] {
          run_sensitivity_grid_file((dir / "bad.json").string(), 1000, 100, 21,
                                    (dir / "bad.csv").string());
        }) == ErrorCode::Validation);
}
