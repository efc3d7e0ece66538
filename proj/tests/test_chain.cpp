#include <doctest.h>

#include <cmath>
#include <numbers>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigma2x/chain.hpp"
#include "sigma2x/probe.hpp"

using namespace sigma2x;
using namespace sigma2x::chain;

namespace {

constexpr double kPi = std::numbers::pi;

std::string normalize_volatile(std::string s) {
  s = std::regex_replace(s, std::regex("\"timestamp\": \"[^\"]*\""),
                         "\"timestamp\": \"T\"");
  s = std::regex_replace(s, std::regex("\"wall_ms\": [-+0-9.eE]+"),
                         "\"wall_ms\": 0");
  return s;
}

}  // namespace

TEST_CASE("the factor probe recovers injected normalization slips") {
  const auto& probe = FactorProbe::default_probe();
  REQUIRE(probe.candidates.size() == 27);

  bool has_unity = false;
  for (const auto& c : probe.candidates)
    if (c.label == "1" && c.value == 1.0) has_unity = true;
  CHECK(has_unity);

  const double v = 0.7281;  // arbitrary nonzero computed value
  struct Inject {
    double factor;
    const char* label;
  };
  for (const auto& in : std::vector<Inject>{{2.0, "2"},
                                            {0.5, "1/2"},
                                            {kPi * kPi, "1*pi^2"},
                                            {1.0 / (kPi * kPi), "1/pi^2"},
                                            {1.0, "1"},
                                            {16.0 * kPi * kPi, "16*pi^2"}}) {
    CAPTURE(in.label);
    auto m = probe.best(v, v * in.factor, 1e-10);
    CHECK(m.best_factor_label == in.label);
    CHECK(m.relative_deviation <= 1e-14);
    CHECK_FALSE(m.ambiguous);
  }
}

TEST_CASE("the probe declares ambiguity only when two factors fit") {
  const auto& probe = FactorProbe::default_probe();
  // Halfway (geometrically) between candidates 1 and pi^2/8: both are off by
  // about 10%, so a sloppy 15% tolerance cannot distinguish them.
  const double between = std::sqrt(kPi * kPi / 8.0);
  auto loose = probe.best(1.0, between, 0.15);
  CHECK(loose.ambiguous);
  auto strict = probe.best(1.0, between, 0.05);
  CHECK_FALSE(strict.ambiguous);
  CHECK(strict.relative_deviation > 0.05);  // nothing fits well either
}

TEST_CASE("the step table is complete and ordered") {
  const auto& ids = all_step_ids();
  REQUIRE(ids.size() == 19);
  CHECK(ids.front() == "S_23a");
  CHECK(ids.back() == "S_consts");
  CHECK(has_step("S_16"));
  CHECK(has_step("S_5_X1"));
  CHECK_FALSE(has_step("S_99"));
}

TEST_CASE("selection validation") {
  CHECK_THROWS_AS(run_chain({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_chain({"S_bogus"}, {}), std::out_of_range);
}

TEST_CASE("tabulated 1D stages verify to near machine precision") {
  auto rep = run_chain({"S_23a", "S_23b", "S_T1", "S_T2"}, {});
  REQUIRE(rep.steps.size() == 4);
  CHECK(rep.verdict == "pass");
  CHECK(rep.passed());
  for (const auto& s : rep.steps) {
    CAPTURE(s.id);
    CHECK(s.status == "pass");
    CHECK(s.best_factor == "1");
    CHECK(s.relative_deviation <= 1e-12);
    CHECK(s.n_evals > 0);
    CHECK(s.wall_ms >= 0.0);
    CHECK_FALSE(s.paper_ref.empty());
    CHECK_FALSE(s.expected_expression.empty());
  }
}

TEST_CASE("steps are reported in chain order and deduplicated") {
  auto rep = run_chain({"S_T2", "S_23a", "S_T2"}, {});
  REQUIRE(rep.steps.size() == 2);
  CHECK(rep.steps[0].id == "S_23a");
  CHECK(rep.steps[1].id == "S_T2");
}

TEST_CASE("a single-stage run stands alone") {
  auto rep = run_chain({"S_sigma"}, {});
  REQUIRE(rep.steps.size() == 1);
  const auto& s = rep.steps[0];
  CHECK(s.id == "S_sigma");
  CHECK(s.status == "discrepancy");
  CHECK(s.best_factor == "1/pi^2");
  CHECK(s.best_factor_value ==
        doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-15));
  CHECK(s.relative_deviation <= 1e-12);
  CHECK(s.note.find("4*pi^4") != std::string::npos);
  CHECK(rep.verdict == "pass");  // a stable, documented factor still passes
}

TEST_CASE("constant-level discrepancies are marked as re-run invariant") {
  auto rep = run_chain({"S_consts"}, {});
  REQUIRE(rep.steps.size() == 1);
  CHECK(rep.steps[0].status == "discrepancy");
  CHECK(rep.steps[0].best_factor == "1/pi^2");
  CHECK(rep.steps[0].note.find("re-runs are identical") != std::string::npos);
}

TEST_CASE("the single-integral stage shows the stable factor two") {
  auto rep = run_chain({"S_16"}, {});
  REQUIRE(rep.steps.size() == 1);
  const auto& s = rep.steps[0];
  CHECK(s.status == "discrepancy");
  CHECK(s.best_factor == "2");
  CHECK(s.note.find("stable under re-run") != std::string::npos);
  CHECK(std::abs(2.0 * s.computed_value - s.expected_value) <=
        1e-10 * std::abs(s.expected_value));
  CHECK(s.strategy == "ts");
}

TEST_CASE("text rendering carries statuses, factors, and the verdict") {
  auto rep = run_chain({"S_23a", "S_16", "S_sigma"}, {});
  const std::string text = render_text(rep);
  CHECK(text.find("[PASS]") != std::string::npos);
  CHECK(text.find("[DISCREPANCY]") != std::string::npos);
  CHECK(text.find("1/pi^2") != std::string::npos);
  CHECK(text.find("verdict: pass") != std::string::npos);
  CHECK(text.find("S_23a") != std::string::npos);
}

TEST_CASE("the structured report follows the fixed schema") {
  auto rep = run_chain({"S_23a", "S_16"}, {});
  const std::string doc = render_json(rep);
  const auto j = nlohmann::json::parse(doc);

  CHECK(j.at("schema_version").get<std::string>() == "1");
  const std::string ts = j.at("timestamp").get<std::string>();
  CHECK(std::regex_match(
      ts, std::regex(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)")));
  CHECK(j.at("verdict").get<std::string>() == "pass");

  const auto& steps = j.at("steps");
  REQUIRE(steps.is_array());
  REQUIRE(steps.size() == 2);
  for (const auto& s : steps) {
    CHECK(s.contains("id"));
    CHECK(s.contains("paper_ref"));
    CHECK(s.contains("status"));
    const auto& c = s.at("computed");
    CHECK(c.contains("value"));
    CHECK(c.contains("error_estimate"));
    CHECK(c.contains("n_evals"));
    CHECK(c.contains("wall_ms"));
    CHECK(c.contains("strategy"));
    const auto& e = s.at("expected");
    CHECK(e.contains("expression"));
    CHECK(e.contains("value"));
    const auto& p = s.at("probe");
    CHECK(p.at("candidates").size() == 27);
    CHECK(p.contains("best_factor"));
    CHECK(p.contains("relative_deviation"));
  }
  CHECK(steps[1].at("probe").at("best_factor").get<std::string>() == "2");

  // Keys come out in schema order.
  const auto pos_schema = doc.find("\"schema_version\"");
  const auto pos_ts = doc.find("\"timestamp\"");
  const auto pos_steps = doc.find("\"steps\"");
  const auto pos_verdict = doc.rfind("\"verdict\"");
  CHECK(pos_schema < pos_ts);
  CHECK(pos_ts < pos_steps);
  CHECK(pos_steps < pos_verdict);
}

TEST_CASE("structured reports are reproducible once timing is masked") {
  auto a = render_json(run_chain({"S_23a", "S_16"}, {}));
  auto b = render_json(run_chain({"S_23a", "S_16"}, {}));
  CHECK(normalize_volatile(a) == normalize_volatile(b));
}
