// Scenario files: one JSON document describing an equation in the power-log
// coefficient family, a history, solver options, the engine choice and the
// expected outcome. Custom coefficient functions are not expressible in
// config; the handful of fixtures outside the family ship as named builtins.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "hldde/asymptotics.hpp"

namespace hldde {

// Carries the dotted field path so the CLI can point at the offending entry.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& what)
        : std::runtime_error(f.empty() ? what : f + ": " + what), field(std::move(f)) {}
};

enum class EngineChoice { Auto, Sv, Rv, Gen1, Gen2 };
enum class RunMode { Solve, Classify, Hypotheses, Verify };

std::string to_string(EngineChoice engine);
std::string to_string(RunMode mode);
EngineChoice engine_from_string(const std::string& s); // throws ConfigError
RunMode mode_from_string(const std::string& s);        // throws ConfigError

// Deterministic routing for engine = auto: structured coefficients go by the
// index of p (above / below -1); the borderline and the non power-log cases
// go to the substitution engines by the mode of the integral of r^{1-beta}.
EngineChoice resolve_engine(const HalfLinearEquation& eq);

struct ExpectedOutcome {
    std::optional<ClassLabel> solution_class;
    std::optional<bool> applicable;
    std::optional<std::string> formula;  // printed FormulaId name
    std::optional<EngineChoice> engine;  // what auto must resolve to
    std::optional<bool> not_rv;          // trajectory drift verdict
    // t y'(t)/y(t) probe: (location, value); tolerance key omega_rel
    std::optional<std::pair<double, double>> omega;
    std::map<std::string, bool> checks;  // named hypothesis checks that must land this way
    // exact solution scale * t^exponent for solver-accuracy scenarios
    std::optional<std::pair<double, double>> exact_power;
};

struct Scenario {
    std::string name;
    HalfLinearEquation equation;
    HistorySpec history;
    double t_end;
    SolveOptions solver;
    EngineChoice engine = EngineChoice::Auto;
    RunMode mode = RunMode::Verify;
    std::map<std::string, double> tolerances; // overrides of the named defaults
    ExpectedOutcome expect;
};

// Parse from JSON text. The file argument only labels diagnostics; malformed
// JSON raises ConfigError with a line/column prefix, schema violations raise
// ConfigError with the dotted field path.
Scenario parse_scenario(const std::string& text, const std::string& file = "config");

Scenario load_scenario(const std::string& path); // reads the file, then parses

} // namespace hldde
