#include <doctest.h>

#include <nlohmann/json.hpp>

#include "tlreflect/jobrunner.hpp"

using namespace tlr;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json fourier_model_json(std::size_t n) {
  json lambdas = json::array();
  json exponents = json::array();
  for (std::size_t a = 0; a < n; ++a) {
    const double phase = 2.0 * M_PI * double(a) / double(n);
    lambdas.push_back({std::cos(phase), std::sin(phase)});
    exponents.push_back(a);
  }
  return {{"n", n},
          {"lambdas", lambdas},
          {"exponents", exponents},
          {"branch", "plus"}};
}

ordered_json strip_timings(ordered_json j) {
  j.erase("timing");
  for (auto& entry : j["tasks"]) entry.erase("wall_ms");
  return j;
}

} // namespace

TEST_CASE("config parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_config(json::array()), Error);
  CHECK_THROWS_AS(parse_config(json::object()), Error);

  json bad_task = {{"model", fourier_model_json(2)}, {"tasks", {"frobnicate"}}};
  CHECK_THROWS_AS(parse_config(bad_task), Error);

  json repeated = {{"model",
                    {{"n", 2},
                     {"lambdas", {{1.0, 0.0}, {1.0, 0.0}}},
                     {"exponents", {0, 1}}}}};
  CHECK_THROWS_AS(parse_config(repeated), Error);

  json plan_without = {{"model", fourier_model_json(2)}, {"tasks", {"sample"}}};
  CHECK_THROWS_AS(parse_config(plan_without), Error);

  json bad_plan = {{"model", fourier_model_json(2)},
                   {"plan",
                    {{"classes",
                      {{{"d", {1.0, 0.0}},
                        {"subblocks", {{{"kind", "zero"}, {"size", 5}}}}}}}}}};
  CHECK_THROWS_AS(parse_config(bad_plan), Error);

  try {
    parse_config(json::object());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
  }
}

TEST_CASE("basic verification job passes") {
  json input = {{"model", fourier_model_json(2)},
                {"tasks", {"validate", "tl", "ybe"}}};
  const RunResult result = run_job(parse_config(input));
  CHECK(result.all_pass);
  CHECK(result.report["overall_pass"].get<bool>());
  CHECK(result.report["tasks"].size() == 3);
  for (const auto& entry : result.report["tasks"]) {
    CHECK(entry["pass"].get<bool>());
  }
  CHECK(result.report["tool"]["version"] == kToolVersion);
  CHECK(result.report["conventions"].contains("qprime_branch"));
  CHECK(result.report["conventions"].contains("dimension_counting"));
}

TEST_CASE("full pipeline on the n = 3 Fourier model") {
  json input = {
      {"model", fourier_model_json(3)},
      {"plan",
       {{"classes",
         {{{"d", {1.0, 0.0}},
           {"subblocks",
            {{{"kind", "two_eigen"}, {"s", 3}, {"m_prime", 1}}}}}}}}},
      {"seeds", {1, 2, 3}},
      {"tasks",
       {"validate", "tl", "ybe", "sample", "reflect", "components", "moduli"}}};
  const RunResult result = run_job(parse_config(input));
  CHECK(result.all_pass);

  std::size_t reflect_entries = 0;
  for (const auto& entry : result.report["tasks"]) {
    if (entry["task"] == "reflect") {
      ++reflect_entries;
      CHECK(entry["pass"].get<bool>());
    }
    if (entry["task"] == "moduli") {
      CHECK(entry["moduli_complex"].get<long>() == 2);
      CHECK(entry["expected_complex"].get<long>() == 2);
    }
  }
  CHECK(reflect_entries == 3);
}

TEST_CASE("involution plan at n = 4 runs the whole task chain") {
  json input = {
      {"model", fourier_model_json(4)},
      {"plan",
       {{"classes",
         {{{"d", {0.0, 0.0}},
           {"subblocks",
            {{{"kind", "involution"}, {"s", 4}, {"delta_prime", {2.0, 1.0}}}}}}}}}},
      {"seeds", {6}},
      {"tasks",
       {"validate", "tl", "ybe", "sample", "reflect", "components", "moduli"}}};
  const RunResult result = run_job(parse_config(input));
  CHECK(result.all_pass);
  for (const auto& entry : result.report["tasks"]) {
    if (entry["task"] == "moduli") {
      CHECK(entry["expected_complex"].get<long>() == 5);
      CHECK(entry["moduli_complex"].get<long>() == 5);
    }
  }
}

TEST_CASE("a two-eigen plan on the degenerate n = 4 model fails cleanly") {
  json input = {
      {"model", fourier_model_json(4)},
      {"plan",
       {{"classes",
         {{{"d", {1.0, 0.0}},
           {"subblocks", {{{"kind", "two_eigen"}, {"s", 3}, {"m_prime", 1}}}}},
          {{"d", {2.0, 0.0}},
           {"subblocks", {{{"kind", "zero"}, {"size", 1}}}}}}}}},
      {"seeds", {1}},
      {"tasks", {"sample", "reflect"}}};
  const RunResult result = run_job(parse_config(input));
  CHECK_FALSE(result.all_pass);
  bool saw_degenerate = false;
  for (const auto& entry : result.report["tasks"]) {
    if (entry.contains("error") &&
        entry["error"].get<std::string>().find("DegenerateCoefficient") !=
            std::string::npos) {
      saw_degenerate = true;
    }
  }
  CHECK(saw_degenerate);
}

TEST_CASE("a failing model yields a failing report, not an exception") {
  json input = {{"model",
                 {{"n", 2},
                  {"lambdas", {{1.0, 0.0}, {2.0, 0.0}}},
                  {"exponents", {0, 1}}}},
                {"tasks", {"validate", "tl"}}};
  const RunResult result = run_job(parse_config(input));
  CHECK_FALSE(result.all_pass);
  CHECK_FALSE(result.report["tasks"][0]["pass"].get<bool>());
  // tl is blocked by the failed model and reports the reason
  CHECK(result.report["tasks"][1].contains("error"));
}

TEST_CASE("reports are deterministic modulo timing fields") {
  json input = {
      {"model", fourier_model_json(3)},
      {"plan",
       {{"classes",
         {{{"d", {1.0, 0.0}},
           {"subblocks",
            {{{"kind", "two_eigen"}, {"s", 3}, {"m_prime", 1}}}}}}}}},
      {"seeds", {42, 43}},
      {"tasks", {"validate", "sample", "reflect", "components"}}};
  const RunResult a = run_job(parse_config(input));
  const RunResult b = run_job(parse_config(input));
  CHECK(strip_timings(a.report).dump() == strip_timings(b.report).dump());

  // parallel fan-out must not change the report
  JobConfig parallel_config = parse_config(input);
  parallel_config.parallel = 2;
  const RunResult c = run_job(parallel_config);
  CHECK(strip_timings(a.report).dump() == strip_timings(c.report).dump());
}

TEST_CASE("residuals are serialized with full precision") {
  const double value = 1.2345678901234567e-11;
  const std::string s = format_residual(value);
  CHECK(std::stod(s) == value);
}

TEST_CASE("V-W job passes end to end") {
  json model = fourier_model_json(2);
  model["vw"] = {{"v", {{1.0, 1.0}, {0.0, 2.0}}},
                 {"w", {{0.5, -0.5}, {0.0, -0.5}}}}; // w = 1/v entrywise
  json input = {
      {"model", model},
      {"plan",
       {{"classes",
         {{{"d", {0.0, 0.0}},
           {"subblocks", {{{"kind", "nilpotent"}, {"t", 2}, {"m", 1}}}}}}}}},
      {"tasks", {"validate", "tl", "ybe", "sample", "reflect", "components"}}};
  const RunResult result = run_job(parse_config(input));
  CHECK(result.all_pass);
}
