#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <string>

#include "hldde/report.hpp"

using namespace hldde;

namespace {

const char* kSolveScenario = R"({
  "name": "exact_square",
  "equation": {
    "alpha": 2.0,
    "r": 1.0,
    "p": {"scale": 8.0, "power": -2.0},
    "delay": {"kind": "proportional", "ratio": 0.5},
    "a": 1.0
  },
  "history": {"kind": "power", "exponent": 2.0},
  "t_end": 100.0,
  "mode": "solve",
  "expect": {"exact": {"scale": 1.0, "exponent": 2.0}}
})";

const char* kClassifyScenario = R"({
  "name": "decreasing_fixture",
  "equation": {"builtin": "gauss-decay"},
  "history": {"kind": "gauss"},
  "t_end": 4.5,
  "mode": "classify",
  "expect": {
    "class": "D",
    "not_rv": true,
    "omega": {"t": 4.0, "value": -32.0}
  }
})";

const MetricRow* find_metric(const RunReport& rep, const std::string& name) {
    auto it = std::find_if(rep.metrics.begin(), rep.metrics.end(),
                           [&](const MetricRow& m) { return m.name == name; });
    return it == rep.metrics.end() ? nullptr : &*it;
}

} // namespace

TEST_CASE("solve mode measures the trajectory against the exact power") {
    RunReport rep = run_scenario(parse_scenario(kSolveScenario));
    CHECK(rep.pass);
    CHECK(rep.error.empty());
    REQUIRE(rep.trajectory.has_value());
    auto* complete = find_metric(rep, "trajectory_complete");
    REQUIRE(complete);
    CHECK(complete->pass);
    auto* err = find_metric(rep, "exact_rel_error_end");
    REQUIRE(err);
    CHECK(err->value < err->threshold);
    CHECK(err->value < 1e-5);
}

TEST_CASE("classify mode commits the label and the drift verdict") {
    RunReport rep = run_scenario(parse_scenario(kClassifyScenario));
    CHECK(rep.pass);
    REQUIRE(rep.observed.has_value());
    CHECK(rep.observed->label == ClassLabel::D);
    auto* nrv = find_metric(rep, "not_rv");
    REQUIRE(nrv);
    CHECK(nrv->pass);
    auto* omega = find_metric(rep, "omega_probe");
    REQUIRE(omega);
    CHECK(omega->pass);
    auto* cls = find_metric(rep, "class_expected");
    REQUIRE(cls);
    CHECK(cls->pass);
}

TEST_CASE("hypotheses mode checks expectations without solving") {
    RunReport rep = run_scenario(parse_scenario(R"({
      "name": "saturating_hypotheses",
      "equation": {
        "alpha": 2.0,
        "r": {"power": 2.0, "log_powers": [2.0]},
        "p": 1.0,
        "delay": {"kind": "shift", "amount": 1.0},
        "a": 2.8
      },
      "history": {"kind": "power", "exponent": 0.02},
      "t_end": 1e4,
      "mode": "hypotheses",
      "expect": {"engine": "sv", "applicable": true, "formula": "F2",
                 "checks": {"p_index": true}}
    })"));
    CHECK(rep.pass);
    CHECK_FALSE(rep.trajectory.has_value());
    REQUIRE(rep.hypotheses.has_value());
    CHECK(rep.hypotheses->applicable);
    for (const char* name : {"engine_match", "applicable_expected", "formula_expected",
                             "check:p_index"}) {
        auto* m = find_metric(rep, name);
        REQUIRE_MESSAGE(m, name);
        CHECK(m->pass);
    }
}

TEST_CASE("expectation mismatches fail the run without an error") {
    RunReport rep = run_scenario(parse_scenario(R"({
      "name": "wrong_expectations",
      "equation": {
        "alpha": 2.0,
        "r": {"power": 2.0, "log_powers": [2.0]},
        "p": 1.0,
        "delay": {"kind": "shift", "amount": 1.0},
        "a": 2.8
      },
      "history": {"kind": "power", "exponent": 0.02},
      "t_end": 1e4,
      "mode": "hypotheses",
      "expect": {"applicable": false, "checks": {"no_such_check": true}}
    })"));
    CHECK_FALSE(rep.pass);
    CHECK(rep.error.empty());
    auto* app = find_metric(rep, "applicable_expected");
    REQUIRE(app);
    CHECK_FALSE(app->pass);
    auto* ghost = find_metric(rep, "check:no_such_check");
    REQUIRE(ghost);
    CHECK_FALSE(ghost->pass);
    CHECK(ghost->note.find("no such hypothesis check") != std::string::npos);
}

TEST_CASE("stage errors land in the report, artifacts still render") {
    RunReport rep = run_scenario(parse_scenario(R"({
      "name": "negative_history",
      "equation": {"alpha": 2.0, "r": 1.0, "p": 1.0,
                   "delay": {"kind": "shift", "amount": 1.0}, "a": 1.0},
      "history": {"kind": "power", "scale": -1.0, "exponent": 1.0},
      "t_end": 10.0,
      "mode": "solve"
    })"));
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.error.empty());
    std::string md = report_markdown(rep);
    CHECK(md.find("negative_history") != std::string::npos);
    CHECK(md.find(rep.error) != std::string::npos);
    CHECK(!metrics_csv(rep).empty());
}

TEST_CASE("renderers are byte deterministic") {
    Scenario sc = parse_scenario(kSolveScenario);
    RunReport a = run_scenario(sc);
    RunReport b = run_scenario(sc);
    CHECK(report_markdown(a) == report_markdown(b));
    CHECK(report_jsonl(a) == report_jsonl(b));
    CHECK(metrics_csv(a) == metrics_csv(b));
    CHECK(trajectory_csv(*a.trajectory) == trajectory_csv(*b.trajectory));
    // timing is console-only and must not leak into any artifact
    CHECK(report_markdown(a).find("wall") == std::string::npos);
}

TEST_CASE("artifact formats") {
    Scenario sc = parse_scenario(kSolveScenario);
    RunReport rep = run_scenario(sc);

    std::string csv = trajectory_csv(*rep.trajectory);
    CHECK(csv.rfind("t,y,y_prime,quasi\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == long(rep.trajectory->ts.size()) + 1);

    std::string mc = metrics_csv(rep);
    CHECK(mc.rfind("metric,value,threshold,pass\n", 0) == 0);

    std::string jl = report_jsonl(rep);
    if (!jl.empty()) CHECK(jl.front() == '{');
    std::string md = report_markdown(rep);
    CHECK(md.find("exact_square") != std::string::npos);
    CHECK(md.find("exact_rel_error_end") != std::string::npos);
}

TEST_CASE("verify mode produces the full pipeline report") {
    RunReport rep = run_scenario(parse_scenario(R"({
      "name": "superlinear_verify",
      "equation": {
        "alpha": 2.0,
        "r": {"power": -1.0},
        "p": {"power": -3.0, "log_powers": [-2.0]},
        "delay": {"kind": "proportional", "ratio": 0.5},
        "a": 3.0
      },
      "history": {"kind": "power", "exponent": 2.0},
      "t_end": 1e4,
      "mode": "verify",
      "expect": {"engine": "rv", "class": "I_{inf,B}"}
    })"));
    CHECK(rep.pass);
    REQUIRE(rep.hypotheses.has_value());
    REQUIRE(rep.fit.has_value());
    REQUIRE(rep.observed.has_value());
    CHECK(rep.observed->label == ClassLabel::IInfB);
    for (const char* name : {"hypotheses_applicable", "class_match", "final_ratio_dev",
                             "index_dev", "smallness_trend", "engine_match"}) {
        auto* m = find_metric(rep, name);
        REQUIRE_MESSAGE(m, name);
        CHECK(m->pass);
    }
    // trace series render at full precision for downstream tooling
    std::string jl = report_jsonl(rep);
    CHECK(jl.find("\"series\":\"comparison\"") != std::string::npos);
    CHECK(jl.find("\"series\":\"smallness\"") != std::string::npos);
}
