#include "hldde/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "hldde/errors.hpp"
#include "hldde/grid.hpp"

namespace hldde {

namespace {

std::string g17(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string g6(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

double tol_of(const Scenario& sc, const std::string& key, double fallback) {
    auto it = sc.tolerances.find(key);
    return it == sc.tolerances.end() ? fallback : it->second;
}

EngineOptions engine_options(const Scenario& sc) {
    EngineOptions opt;
    opt.trend_threshold = tol_of(sc, "trend_threshold", opt.trend_threshold);
    opt.index_tolerance = tol_of(sc, "index_tolerance", opt.index_tolerance);
    opt.sv_threshold = tol_of(sc, "sv_threshold", opt.sv_threshold);
    return opt;
}

HypothesisReport run_hypotheses(EngineChoice engine, const HalfLinearEquation& eq,
                                const EngineOptions& opt) {
    switch (engine) {
    case EngineChoice::Sv: return check_hypotheses_sv(eq, opt);
    case EngineChoice::Rv: return check_hypotheses_rv(eq, opt);
    case EngineChoice::Gen1: return check_hypotheses_gen1(eq, opt);
    case EngineChoice::Gen2: return check_hypotheses_gen2(eq, opt);
    default: throw InvalidParameter("run_hypotheses: engine not resolved");
    }
}

AsymptoticFit run_verify(EngineChoice engine, const HalfLinearEquation& eq, const Trajectory& traj,
                         const EngineOptions& opt) {
    switch (engine) {
    case EngineChoice::Sv: return verify_sv(eq, traj, opt);
    case EngineChoice::Rv: return verify_rv(eq, traj, opt);
    case EngineChoice::Gen1: return verify_gen1(eq, traj, opt);
    case EngineChoice::Gen2: return verify_gen2(eq, traj, opt);
    default: throw InvalidParameter("run_verify: engine not resolved");
    }
}

void add_metric(RunReport& rep, std::string name, double value, double threshold, bool pass,
                std::string note) {
    rep.metrics.push_back({std::move(name), value, threshold, pass, std::move(note)});
}

// value within [0, threshold]
void add_bound(RunReport& rep, std::string name, double value, double threshold,
               std::string note) {
    bool ok = std::isfinite(value) && value <= threshold;
    add_metric(rep, std::move(name), value, threshold, ok, std::move(note));
}

void add_flag(RunReport& rep, std::string name, bool observed, bool expected, std::string note) {
    add_metric(rep, std::move(name), observed ? 1.0 : 0.0, expected ? 1.0 : 0.0,
               observed == expected, std::move(note));
}

void expectation_metrics(RunReport& rep, const Scenario& sc) {
    const ExpectedOutcome& ex = sc.expect;
    if (ex.engine)
        add_flag(rep, "engine_match", rep.engine == *ex.engine, true,
                 "auto routing resolves to " + to_string(*ex.engine));
    if (ex.applicable && rep.hypotheses)
        add_flag(rep, "applicable_expected", rep.hypotheses->applicable, *ex.applicable,
                 "hypothesis report applicability");
    if (ex.formula && rep.hypotheses)
        add_flag(rep, "formula_expected", to_string(rep.hypotheses->formula_id) == *ex.formula,
                 true, "predicted formula is " + *ex.formula);
    if (ex.solution_class && rep.observed)
        add_flag(rep, "class_expected", rep.observed->label == *ex.solution_class, true,
                 "observed class is " + to_string(*ex.solution_class));
    if (rep.hypotheses) {
        for (const auto& [name, want] : ex.checks) {
            bool found = false;
            for (const auto& c : rep.hypotheses->checks) {
                if (c.name == name) {
                    add_flag(rep, "check:" + name, c.pass, want, "named hypothesis check");
                    found = true;
                    break;
                }
            }
            if (!found)
                add_metric(rep, "check:" + name, 0.0, 1.0, false, "no such hypothesis check");
        }
    }
}

void trajectory_metrics(RunReport& rep, const Scenario& sc) {
    const Trajectory& traj = *rep.trajectory;
    add_flag(rep, "trajectory_complete", traj.status == TrajectoryStatus::Complete, true,
             "integration reached t_end");
    if (sc.expect.exact_power) {
        auto [scale, e] = *sc.expect.exact_power;
        double t = traj.t_end();
        double exact = scale * std::pow(t, e);
        double err = std::fabs(traj.value(t) - exact) / std::fabs(exact);
        add_bound(rep, "exact_rel_error_end", err, tol_of(sc, "exact_rel_error", 1e-5),
                  "relative error against the exact power solution at t_end");
    }
}

void classify_metrics(RunReport& rep, const Scenario& sc) {
    const Trajectory& traj = *rep.trajectory;
    if (sc.expect.not_rv) {
        double hi = traj.t_end();
        double tau_a = sc.equation.delay().tau(traj.t_start());
        double lo = hi / 1001.0;
        if (tau_a > lo) lo = tau_a * 1.000001;
        auto grid = geometric_grid(lo, hi, 24);
        auto est = nrv_index_from_logderivative([&traj](double t) { return traj.value(t); },
                                                [&traj](double t) { return traj.derivative(t); },
                                                grid);
        add_flag(rep, "not_rv", est.verdict == RVVerdict::NotRV, *sc.expect.not_rv,
                 "log-derivative drift verdict");
    }
    if (sc.expect.omega) {
        auto [t, want] = *sc.expect.omega;
        double got = t * rep.trajectory->derivative(t) / rep.trajectory->value(t);
        double dev = std::fabs(got - want) / std::fabs(want);
        add_bound(rep, "omega_probe", dev, tol_of(sc, "omega_rel", 0.01),
                  "relative deviation of t y'/y at t = " + g6(t));
    }
}

void fit_metrics(RunReport& rep, const Scenario& sc) {
    const AsymptoticFit& fit = *rep.fit;
    const HypothesisReport& hyp = *rep.hypotheses;

    bool match = rep.observed->label == hyp.predicted_class;
    add_flag(rep, "class_match", match, true,
             "observed class equals predicted " + to_string(hyp.predicted_class));

    add_bound(rep, "final_ratio_dev", std::fabs(fit.final_ratio - 1.0),
              tol_of(sc, "final_ratio_band", 0.3), "deviation of the comparison ratio from 1");

    double idx_tol = tol_of(sc, "index_tolerance", 0.05);
    add_bound(rep, "index_dev", std::fabs(fit.index_estimate.index - hyp.predicted_index),
              idx_tol * std::max(1.0, std::fabs(hyp.predicted_index)),
              "index estimate against predicted " + g6(hyp.predicted_index));

    if (fit.limit_constants.N || fit.limit_constants.M)
        add_bound(rep, "limit_stability", fit.limit_stability,
                  tol_of(sc, "limit_stability", 0.01),
                  "relative change of the extrapolated limit between fit windows");

    if (fit.smallness_trace.size() >= 2) {
        double first = fit.smallness_trace.front().second;
        double last = fit.smallness_trace.back().second;
        double ratio = first == 0.0 ? 1.0 : last / first;
        add_bound(rep, "smallness_trend", ratio, tol_of(sc, "trend_ratio", 1.0),
                  "last/first of the remainder smallness trace");
    }

    if (fit.pi_report)
        add_flag(rep, "pi_class_holds", fit.pi_report->holds, true,
                 "de Haan comparison with shrinking deviation");
}

} // namespace

RunReport run_scenario(const Scenario& sc) {
    RunReport rep;
    rep.scenario = sc.name;
    rep.mode = sc.mode;
    auto t0 = std::chrono::steady_clock::now();
    try {
        rep.engine = sc.engine == EngineChoice::Auto ? resolve_engine(sc.equation) : sc.engine;
        EngineOptions opt = engine_options(sc);

        if (sc.mode == RunMode::Hypotheses || sc.mode == RunMode::Verify)
            rep.hypotheses = run_hypotheses(rep.engine, sc.equation, opt);

        if (sc.mode != RunMode::Hypotheses) {
            rep.trajectory = solve(sc.equation, sc.history, sc.t_end, sc.solver);
            rep.observed = classify_trajectory(*rep.trajectory);
        }

        switch (sc.mode) {
        case RunMode::Solve:
            trajectory_metrics(rep, sc);
            break;
        case RunMode::Classify:
            trajectory_metrics(rep, sc);
            classify_metrics(rep, sc);
            break;
        case RunMode::Hypotheses:
            if (!sc.expect.applicable)
                add_flag(rep, "applicable", rep.hypotheses->applicable, true,
                         "hypothesis report applicability");
            break;
        case RunMode::Verify:
            add_flag(rep, "hypotheses_applicable", rep.hypotheses->applicable, true,
                     "every hypothesis check passed");
            rep.fit = run_verify(rep.engine, sc.equation, *rep.trajectory, opt);
            fit_metrics(rep, sc);
            break;
        }
        expectation_metrics(rep, sc);
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    rep.pass = rep.error.empty();
    for (const auto& m : rep.metrics) rep.pass = rep.pass && m.pass;
    return rep;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,y,y_prime,quasi\n";
    for (std::size_t i = 0; i < traj.ts.size(); ++i) {
        out += g17(traj.ts[i]);
        out += ',';
        out += g17(traj.ys[i]);
        out += ',';
        out += g17(traj.y_primes[i]);
        out += ',';
        out += g17(traj.quasis[i]);
        out += '\n';
    }
    return out;
}

std::string report_markdown(const RunReport& rep) {
    std::string out = "# " + rep.scenario + "\n\n";
    out += "- mode: " + to_string(rep.mode) + "\n";
    out += "- engine: " + to_string(rep.engine) + "\n";
    out += std::string("- pass: ") + (rep.pass ? "yes" : "no") + "\n";
    if (!rep.error.empty()) out += "- error: " + rep.error + "\n";
    if (rep.observed) out += "- observed class: " + to_string(rep.observed->label) + "\n";
    if (rep.hypotheses) {
        const HypothesisReport& h = *rep.hypotheses;
        out += "- engine verdict: " + to_string(h.theorem) +
               (h.applicable ? " applicable" : " not applicable") + ", predicts " +
               to_string(h.predicted_class) + " via " + to_string(h.formula_id) +
               ", index " + g6(h.predicted_index) + "\n";
    }
    if (rep.fit) {
        const AsymptoticFit& f = *rep.fit;
        out += "- fit: formula " + to_string(f.formula_id) + ", final ratio " +
               g6(f.final_ratio) + ", index " + g6(f.index_estimate.index);
        if (f.limit_constants.N) out += ", N = " + g6(*f.limit_constants.N);
        if (f.limit_constants.M) out += ", M = " + g6(*f.limit_constants.M);
        if (f.limit_constants.N || f.limit_constants.M)
            out += ", stability " + g6(f.limit_stability);
        out += "\n";
    }
    if (rep.hypotheses && !rep.hypotheses->checks.empty()) {
        out += "\n## Hypothesis checks\n\n| check | required | observed | pass |\n"
               "|---|---|---|---|\n";
        for (const auto& c : rep.hypotheses->checks)
            out += "| " + c.name + " | " + c.required + " | " + g6(c.observed) + " | " +
                   (c.pass ? "yes" : "no") + " |\n";
    }
    if (!rep.metrics.empty()) {
        out += "\n## Metrics\n\n| metric | value | threshold | pass | note |\n"
               "|---|---|---|---|---|\n";
        for (const auto& m : rep.metrics)
            out += "| " + m.name + " | " + g6(m.value) + " | " + g6(m.threshold) + " | " +
                   (m.pass ? "yes" : "no") + " | " + m.note + " |\n";
    }
    return out;
}

// Scenario names are restricted to [A-Za-z0-9_-] and series names are code
// constants, so the JSON strings below never need escaping.
std::string report_jsonl(const RunReport& rep) {
    std::string out;
    auto emit = [&out, &rep](const char* series, double t, double v) {
        out += "{\"scenario\":\"" + rep.scenario + "\",\"series\":\"" + series +
               "\",\"t\":" + g17(t) + ",\"value\":" + g17(v) + "}\n";
    };
    if (rep.fit) {
        for (const auto& [t, v] : rep.fit->trace) emit("comparison", t, v);
        for (const auto& [t, v] : rep.fit->smallness_trace) emit("smallness", t, v);
        if (rep.fit->pi_report)
            for (const auto& [t, v] : rep.fit->pi_report->deviation_trace)
                emit("pi_deviation", t, v);
    }
    return out;
}

std::string metrics_csv(const RunReport& rep) {
    std::string out = "metric,value,threshold,pass\n";
    for (const auto& m : rep.metrics)
        out += m.name + "," + g17(m.value) + "," + g17(m.threshold) + "," +
               (m.pass ? "1" : "0") + "\n";
    return out;
}

} // namespace hldde
