#include "hldde/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hldde/errors.hpp"
#include "hldde/improper.hpp"

namespace hldde {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& need(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(join(path, key), "missing required field");
    return *it;
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "must be a number");
    return j.get<double>();
}

std::string str(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "must be a string");
    return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "must be a boolean");
    return j.get<bool>();
}

// Unknown keys are config errors: a typo silently falling back to a default
// would defeat the point of pinned scenarios.
void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> known) {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError(join(path, it.key()), "unknown field");
    }
}

CoefficientExpr parse_coefficient(const json& j, const std::string& path) {
    if (j.is_number()) return CoefficientExpr::constant(j.get<double>());
    check_keys(j, path, {"scale", "power", "log_powers", "exp_rate"});
    double scale = j.contains("scale") ? num(j["scale"], join(path, "scale")) : 1.0;
    double power = j.contains("power") ? num(j["power"], join(path, "power")) : 0.0;
    std::vector<double> log_powers;
    if (j.contains("log_powers")) {
        const json& lp = j["log_powers"];
        if (!lp.is_array()) throw ConfigError(join(path, "log_powers"), "must be an array");
        for (std::size_t i = 0; i < lp.size(); ++i)
            log_powers.push_back(num(lp[i], join(path, "log_powers[" + std::to_string(i) + "]")));
    }
    if (j.contains("exp_rate")) {
        if (!log_powers.empty())
            throw ConfigError(join(path, "log_powers"),
                              "log factors cannot be combined with exp_rate");
        return CoefficientExpr::exponential(scale, num(j["exp_rate"], join(path, "exp_rate")),
                                            power);
    }
    return CoefficientExpr::power_log(scale, power, std::move(log_powers));
}

DelayMap parse_delay(const json& j, const std::string& path) {
    check_keys(j, path, {"kind", "amount", "ratio"});
    std::string kind = str(need(j, "kind", path), join(path, "kind"));
    if (kind == "shift")
        return DelayMap::shift(num(need(j, "amount", path), join(path, "amount")));
    if (kind == "proportional")
        return DelayMap::proportional(num(need(j, "ratio", path), join(path, "ratio")));
    throw ConfigError(join(path, "kind"), "must be \"shift\" or \"proportional\"");
}

HistorySpec parse_history(const json& j, const std::string& path) {
    check_keys(j, path, {"kind", "scale", "exponent"});
    std::string kind = str(need(j, "kind", path), join(path, "kind"));
    double scale = j.contains("scale") ? num(j["scale"], join(path, "scale")) : 1.0;
    if (kind == "power") {
        double e = num(need(j, "exponent", path), join(path, "exponent"));
        return HistorySpec{[scale, e](double t) { return scale * std::pow(t, e); },
                           [scale, e](double t) { return scale * e * std::pow(t, e - 1.0); },
                           std::nullopt};
    }
    if (kind == "gauss") {
        if (j.contains("exponent"))
            throw ConfigError(join(path, "exponent"), "not a gauss history field");
        return HistorySpec{[scale](double t) { return scale * std::exp(-t * t); },
                           [scale](double t) { return -2.0 * t * scale * std::exp(-t * t); },
                           std::nullopt};
    }
    throw ConfigError(join(path, "kind"), "must be \"power\" or \"gauss\"");
}

// Decreasing positive solution fixture outside the power-log family:
// y'' = (4t^2 - 2) e^{1-2t} y(t-1) is solved exactly by y = e^{-t^2}.
HalfLinearEquation gauss_decay_equation() {
    auto value = [](double t) { return (4.0 * t * t - 2.0) * std::exp(1.0 - 2.0 * t); };
    auto deriv = [](double t) {
        return (8.0 * t - 2.0 * (4.0 * t * t - 2.0)) * std::exp(1.0 - 2.0 * t);
    };
    return HalfLinearEquation(2.0, CoefficientExpr::constant(1.0),
                              CoefficientExpr::custom_fn(value, deriv), DelayMap::shift(1.0),
                              1.0);
}

HalfLinearEquation parse_equation(const json& j, const std::string& path) {
    if (j.contains("builtin")) {
        check_keys(j, path, {"builtin"});
        std::string which = str(j["builtin"], join(path, "builtin"));
        if (which == "gauss-decay") return gauss_decay_equation();
        throw ConfigError(join(path, "builtin"), "unknown builtin \"" + which + "\"");
    }
    check_keys(j, path, {"alpha", "r", "p", "delay", "a"});
    double alpha = num(need(j, "alpha", path), join(path, "alpha"));
    CoefficientExpr r = parse_coefficient(need(j, "r", path), join(path, "r"));
    CoefficientExpr p = parse_coefficient(need(j, "p", path), join(path, "p"));
    DelayMap delay = parse_delay(need(j, "delay", path), join(path, "delay"));
    double a = num(need(j, "a", path), join(path, "a"));
    try {
        return HalfLinearEquation(alpha, std::move(r), std::move(p), std::move(delay), a);
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

ClassLabel label_from_string(const std::string& s, const std::string& path) {
    for (ClassLabel l : {ClassLabel::IBB, ClassLabel::IBInf, ClassLabel::IInfB,
                         ClassLabel::IInfInf, ClassLabel::D, ClassLabel::Undetermined})
        if (to_string(l) == s) return l;
    throw ConfigError(path, "unknown solution class \"" + s + "\"");
}

ExpectedOutcome parse_expect(const json& j, const std::string& path) {
    check_keys(j, path,
               {"class", "applicable", "formula", "engine", "not_rv", "omega", "checks", "exact"});
    ExpectedOutcome out;
    if (j.contains("class"))
        out.solution_class = label_from_string(str(j["class"], join(path, "class")),
                                               join(path, "class"));
    if (j.contains("applicable"))
        out.applicable = boolean(j["applicable"], join(path, "applicable"));
    if (j.contains("formula")) out.formula = str(j["formula"], join(path, "formula"));
    if (j.contains("engine"))
        out.engine = engine_from_string(str(j["engine"], join(path, "engine")));
    if (j.contains("not_rv")) out.not_rv = boolean(j["not_rv"], join(path, "not_rv"));
    if (j.contains("omega")) {
        const json& o = j["omega"];
        check_keys(o, join(path, "omega"), {"t", "value"});
        out.omega = {num(need(o, "t", join(path, "omega")), join(path, "omega.t")),
                     num(need(o, "value", join(path, "omega")), join(path, "omega.value"))};
    }
    if (j.contains("checks")) {
        const json& c = j["checks"];
        if (!c.is_object()) throw ConfigError(join(path, "checks"), "must be an object");
        for (auto it = c.begin(); it != c.end(); ++it)
            out.checks[it.key()] = boolean(it.value(), join(path, "checks." + it.key()));
    }
    if (j.contains("exact")) {
        const json& e = j["exact"];
        check_keys(e, join(path, "exact"), {"scale", "exponent"});
        double scale = e.contains("scale") ? num(e["scale"], join(path, "exact.scale")) : 1.0;
        out.exact_power = {scale,
                           num(need(e, "exponent", join(path, "exact")), join(path, "exact.exponent"))};
    }
    return out;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') { ++line; col = 1; }
        else ++col;
    }
    return {line, col};
}

} // namespace

std::string to_string(EngineChoice engine) {
    switch (engine) {
    case EngineChoice::Auto: return "auto";
    case EngineChoice::Sv: return "sv";
    case EngineChoice::Rv: return "rv";
    case EngineChoice::Gen1: return "gen1";
    default: return "gen2";
    }
}

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::Solve: return "solve";
    case RunMode::Classify: return "classify";
    case RunMode::Hypotheses: return "hypotheses";
    default: return "verify";
    }
}

EngineChoice engine_from_string(const std::string& s) {
    if (s == "auto") return EngineChoice::Auto;
    if (s == "sv") return EngineChoice::Sv;
    if (s == "rv") return EngineChoice::Rv;
    if (s == "gen1") return EngineChoice::Gen1;
    if (s == "gen2") return EngineChoice::Gen2;
    throw ConfigError("engine", "must be one of auto, sv, rv, gen1, gen2");
}

RunMode mode_from_string(const std::string& s) {
    if (s == "solve") return RunMode::Solve;
    if (s == "classify") return RunMode::Classify;
    if (s == "hypotheses") return RunMode::Hypotheses;
    if (s == "verify") return RunMode::Verify;
    throw ConfigError("mode", "must be one of solve, classify, hypotheses, verify");
}

EngineChoice resolve_engine(const HalfLinearEquation& eq) {
    if (eq.coefficients_structured()) {
        double delta = eq.delta();
        if (delta > -1.0 + 1e-9) return EngineChoice::Sv;
        if (delta < -1.0 - 1e-9) return EngineChoice::Rv;
    }
    const CoefficientExpr density = eq.r().pow(1.0 - eq.beta());
    Convergence mode;
    if (density.is_structured()) {
        mode = exponent_rule(density);
    } else {
        auto f = [&density](double t) { return density.eval(t); };
        mode = classify_improper(f, std::max(eq.domain_start(), 1.0)).convergence;
    }
    return mode == Convergence::Divergent ? EngineChoice::Gen1 : EngineChoice::Gen2;
}

Scenario parse_scenario(const std::string& text, const std::string& file) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError("", file + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                  ": " + e.what());
    }
    check_keys(j, "", {"name", "equation", "history", "t_end", "solver", "engine", "mode",
                       "tolerances", "expect"});

    std::string name = str(need(j, "name", ""), "name");
    if (name.empty() || name.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                               "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                            std::string::npos)
        throw ConfigError("name", "must be nonempty [A-Za-z0-9_-]");

    HalfLinearEquation eq = parse_equation(need(j, "equation", ""), "equation");
    HistorySpec history = parse_history(need(j, "history", ""), "history");
    double t_end = num(need(j, "t_end", ""), "t_end");
    if (!(t_end > eq.domain_start()))
        throw ConfigError("t_end", "must exceed the domain start");

    SolveOptions solver;
    if (j.contains("solver")) {
        const json& s = j["solver"];
        check_keys(s, "solver", {"step", "tol"});
        if (s.contains("step")) solver.step = num(s["step"], "solver.step");
        if (s.contains("tol")) solver.tol = num(s["tol"], "solver.tol");
    }

    EngineChoice engine = EngineChoice::Auto;
    if (j.contains("engine")) engine = engine_from_string(str(j["engine"], "engine"));
    RunMode mode = RunMode::Verify;
    if (j.contains("mode")) mode = mode_from_string(str(j["mode"], "mode"));

    std::map<std::string, double> tolerances;
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances", "must be an object");
        for (auto it = t.begin(); it != t.end(); ++it)
            tolerances[it.key()] = num(it.value(), "tolerances." + it.key());
    }

    ExpectedOutcome expect;
    if (j.contains("expect")) expect = parse_expect(j["expect"], "expect");

    return Scenario{std::move(name), std::move(eq),     std::move(history),
                    t_end,           solver,            engine,
                    mode,            std::move(tolerances), std::move(expect)};
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

} // namespace hldde
