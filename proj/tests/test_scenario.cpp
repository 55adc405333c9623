#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "hldde/scenario.hpp"

using namespace hldde;

namespace {

const char* kFull = R"({
  "name": "parse_roundtrip",
  "equation": {
    "alpha": 2.5,
    "r": {"scale": 2.0, "power": 1.0, "log_powers": [0.5]},
    "p": 0.75,
    "delay": {"kind": "proportional", "ratio": 0.5},
    "a": 4.0
  },
  "history": {"kind": "power", "scale": 1.5, "exponent": 2.0},
  "t_end": 500.0,
  "solver": {"step": 0.1, "tol": 1e-8},
  "engine": "rv",
  "mode": "hypotheses",
  "tolerances": {"omega_rel": 0.02},
  "expect": {
    "class": "I_{inf,B}",
    "applicable": true,
    "formula": "F21",
    "engine": "rv",
    "checks": {"p_index": true},
    "omega": {"t": 100.0, "value": 2.0},
    "exact": {"scale": 1.0, "exponent": 2.0}
  }
})";

std::string field_of(const std::string& text) {
    try {
        parse_scenario(text, "probe.json");
    } catch (const ConfigError& e) {
        return e.field;
    }
    return "<no error>";
}

} // namespace

TEST_CASE("full scenario round trip") {
    Scenario sc = parse_scenario(kFull);
    CHECK(sc.name == "parse_roundtrip");
    CHECK(sc.equation.alpha() == 2.5);
    CHECK(sc.equation.r_eval(10.0) ==
          doctest::Approx(2.0 * 10.0 * std::sqrt(std::log(10.0))).epsilon(1e-13));
    CHECK(sc.equation.p_eval(3.0) == 0.75);
    CHECK(sc.equation.delay().ratio() == 0.5);
    CHECK(sc.equation.domain_start() == 4.0);
    CHECK(sc.history.phi(2.0) == doctest::Approx(6.0));
    CHECK(sc.history.phi_prime(2.0) == doctest::Approx(6.0));
    CHECK(sc.t_end == 500.0);
    CHECK(sc.solver.step == 0.1);
    CHECK(sc.solver.tol == 1e-8);
    CHECK(sc.engine == EngineChoice::Rv);
    CHECK(sc.mode == RunMode::Hypotheses);
    CHECK(sc.tolerances.at("omega_rel") == 0.02);
    CHECK(sc.expect.solution_class.value() == ClassLabel::IInfB);
    CHECK(sc.expect.applicable.value() == true);
    CHECK(sc.expect.formula.value() == "F21");
    CHECK(sc.expect.engine.value() == EngineChoice::Rv);
    CHECK(sc.expect.checks.at("p_index") == true);
    CHECK(sc.expect.omega.value().first == 100.0);
    CHECK(sc.expect.exact_power.value().second == 2.0);
}

TEST_CASE("defaults when optional sections are absent") {
    Scenario sc = parse_scenario(R"({
      "name": "tiny",
      "equation": {"alpha": 2.0, "r": 1.0, "p": 1.0,
                   "delay": {"kind": "shift", "amount": 0.0}, "a": 1.0},
      "history": {"kind": "power", "exponent": 1.0},
      "t_end": 10.0
    })");
    CHECK(sc.engine == EngineChoice::Auto);
    CHECK(sc.mode == RunMode::Verify);
    CHECK(sc.solver.tol == 1e-10);
    CHECK(sc.tolerances.empty());
    CHECK_FALSE(sc.expect.solution_class.has_value());
}

TEST_CASE("diagnostics carry the dotted field path") {
    // unknown keys anywhere are rejected, with the offending path
    CHECK(field_of(R"({"name":"x","equation":{"alpha":2,"r":1,"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9,"bogus":1})") == "bogus");
    CHECK(field_of(R"({"name":"x","equation":{"alpha":2,"r":{"scale":1,"typo":2},"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9})") == "equation.r.typo");
    CHECK(field_of(R"({"name":"x","equation":{"r":1,"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9})") == "equation.alpha");
    CHECK(field_of(R"({"name":"x","equation":{"alpha":2,"r":1,"p":1,
        "delay":{"kind":"lag","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9})") == "equation.delay.kind");
    CHECK(field_of(R"({"name":"x","equation":{"alpha":2,"r":1,"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"gauss","exponent":1},"t_end":9})") == "history.exponent");
    CHECK(field_of(R"({"name":"x","equation":{"alpha":2,
        "r":{"exp_rate":-1,"log_powers":[1]},"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9})") == "equation.r.log_powers");
    CHECK(field_of(R"({"name":"bad name!","equation":{"alpha":2,"r":1,"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9})") == "name");
    CHECK(field_of(R"({"name":"x","equation":{"alpha":2,"r":1,"p":1,
        "delay":{"kind":"shift","amount":0},"a":5},
        "history":{"kind":"power","exponent":1},"t_end":3})") == "t_end");
    // equation-level contract violations surface as config errors too
    CHECK(field_of(R"({"name":"x","equation":{"alpha":0.5,"r":1,"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9})") == "equation");
}

TEST_CASE("malformed json reports line and column") {
    try {
        parse_scenario("{\n  \"name\": \"x\",\n  oops\n}", "broken.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("broken.json:3:") != std::string::npos);
    }
}

TEST_CASE("builtin equation outside the power-log family") {
    Scenario sc = parse_scenario(R"({
      "name": "builtin",
      "equation": {"builtin": "gauss-decay"},
      "history": {"kind": "gauss"},
      "t_end": 4.0,
      "mode": "classify"
    })");
    CHECK(sc.equation.alpha() == 2.0);
    CHECK_FALSE(sc.equation.coefficients_structured());
    CHECK(sc.equation.p_eval(1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(sc.equation.delay().shift_amount() == 1.0);
    CHECK(field_of(R"({"name":"x","equation":{"builtin":"nope"},
        "history":{"kind":"gauss"},"t_end":4})") == "equation.builtin");
}

TEST_CASE("engine and mode names") {
    CHECK(engine_from_string("gen2") == EngineChoice::Gen2);
    CHECK(to_string(EngineChoice::Gen1) == "gen1");
    CHECK(mode_from_string("solve") == RunMode::Solve);
    CHECK(to_string(RunMode::Classify) == "classify");
    CHECK_THROWS_AS(engine_from_string("magic"), ConfigError);
    CHECK_THROWS_AS(mode_from_string("fast"), ConfigError);
}

TEST_CASE("automatic engine routing") {
    // p index above -1: saturating route
    CHECK(resolve_engine(HalfLinearEquation(2.0, CoefficientExpr::power_log(1.0, 2.0, {2.0}),
                                            CoefficientExpr::constant(1.0), DelayMap::shift(1.0),
                                            2.8)) == EngineChoice::Sv);
    // p index below -1: bounded-quasiderivative route
    CHECK(resolve_engine(HalfLinearEquation(2.0, CoefficientExpr::power(1.0, -1.0),
                                            CoefficientExpr::power_log(1.0, -3.0, {-2.0}),
                                            DelayMap::proportional(0.5), 3.0)) == EngineChoice::Rv);
    // borderline index: substitution engines, split by the density integral
    CHECK(resolve_engine(HalfLinearEquation(2.0, CoefficientExpr::power(1.0, 1.0),
                                            CoefficientExpr::power_log(1.0, -1.0, {-2.0}),
                                            DelayMap::proportional(0.5), 16.0)) ==
          EngineChoice::Gen1);
    CHECK(resolve_engine(HalfLinearEquation(2.0, CoefficientExpr::power(1.0, 2.0),
                                            CoefficientExpr::power_log(1.0, -1.0, {-2.0}),
                                            DelayMap::proportional(0.5), 16.0)) ==
          EngineChoice::Gen2);
    // outside the power-log family the integral is probed numerically
    Scenario sc = parse_scenario(R"({
      "name": "builtin",
      "equation": {"builtin": "gauss-decay"},
      "history": {"kind": "gauss"},
      "t_end": 4.0
    })");
    CHECK(resolve_engine(sc.equation) == EngineChoice::Gen1);
}

TEST_CASE("loading from disk") {
    Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/sv_saturating.json");
    CHECK(sc.name == "sv_saturating");
    CHECK(sc.mode == RunMode::Verify);
    CHECK(sc.expect.engine.value() == EngineChoice::Sv);
    CHECK_THROWS_AS(load_scenario(std::string(SCENARIO_DIR) + "/does_not_exist.json"),
                    ConfigError);
}
