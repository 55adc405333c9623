// Command line front end: scenario ingestion, the solve/classify/verify
// pipelines, the regular-variation property suite, transform consistency
// checks, and the bundled-scenario suite runner.
//
// Exit codes: 0 pass, 1 scenario or check failure (reports still emitted),
// 2 malformed config or invocation, 3 I/O error.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hldde/errors.hpp"
#include "hldde/grid.hpp"
#include "hldde/improper.hpp"
#include "hldde/report.hpp"

using namespace hldde;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("short write to " + path.string());
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
    return p;
}

struct CommonOpts {
    std::string config;
    std::string out = ".";
    double t_end = 0.0; // 0 keeps the scenario value
    double tol = -1.0;  // negative keeps the scenario value
    std::string engine;
    std::string format = "markdown";
    std::vector<std::string> sets;
};

void apply_overrides(Scenario& sc, const CommonOpts& o) {
    if (o.t_end > 0.0) sc.t_end = o.t_end;
    if (o.tol >= 0.0) sc.solver.tol = o.tol;
    if (!o.engine.empty()) sc.engine = engine_from_string(o.engine);
    for (const std::string& kv : o.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set", "expected key=value, got \"" + kv + "\"");
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(kv.substr(eq + 1), &used);
        } catch (const std::exception&) {
            throw ConfigError("--set", "value of \"" + kv + "\" is not a number");
        }
        if (used != kv.size() - eq - 1)
            throw ConfigError("--set", "value of \"" + kv + "\" is not a number");
        sc.tolerances[kv.substr(0, eq)] = v;
    }
}

Scenario load_with_overrides(const CommonOpts& o) {
    Scenario sc = load_scenario(o.config);
    apply_overrides(sc, o);
    return sc;
}

void emit_report_files(const RunReport& rep, const CommonOpts& o) {
    auto dir = ensure_out_dir(o.out);
    if (o.format == "markdown")
        write_file(dir / (rep.scenario + "_report.md"), report_markdown(rep));
    else if (o.format == "jsonl")
        write_file(dir / (rep.scenario + "_trace.jsonl"), report_jsonl(rep));
    else
        write_file(dir / (rep.scenario + "_metrics.csv"), metrics_csv(rep));
}

void print_summary(const RunReport& rep) {
    std::printf("%s: %s", rep.scenario.c_str(), rep.pass ? "pass" : "FAIL");
    if (!rep.error.empty()) std::printf(" (%s)", rep.error.c_str());
    std::printf("\n");
    if (rep.observed) std::printf("  class %s\n", to_string(rep.observed->label).c_str());
    for (const auto& m : rep.metrics)
        if (!m.pass)
            std::printf("  metric %s = %.6g violates %.6g (%s)\n", m.name.c_str(), m.value,
                        m.threshold, m.note.c_str());
    std::fprintf(stderr, "# %s in %.2fs\n", rep.scenario.c_str(), rep.wall_seconds);
}

int cmd_solve(const CommonOpts& o) {
    Scenario sc = load_with_overrides(o);
    Trajectory traj = solve(sc.equation, sc.history, sc.t_end, sc.solver);
    auto dir = ensure_out_dir(o.out);
    auto path = dir / (sc.name + "_trajectory.csv");
    write_file(path, trajectory_csv(traj));
    std::printf("%s: %zu nodes to t = %.6g, wrote %s\n", sc.name.c_str(), traj.ts.size(),
                traj.t_end(), path.string().c_str());
    return traj.status == TrajectoryStatus::Complete ? 0 : 1;
}

int cmd_classify(const CommonOpts& o) {
    Scenario sc = load_with_overrides(o);
    sc.mode = RunMode::Classify;
    RunReport rep = run_scenario(sc);
    if (!o.out.empty()) emit_report_files(rep, o);
    if (rep.observed) {
        std::printf("class=%s\n", to_string(rep.observed->label).c_str());
    }
    print_summary(rep);
    return rep.pass ? 0 : 1;
}

int cmd_verify(const CommonOpts& o) {
    Scenario sc = load_with_overrides(o);
    RunReport rep = run_scenario(sc);
    if (!o.out.empty()) emit_report_files(rep, o);
    print_summary(rep);
    return rep.pass ? 0 : 1;
}

// ---- karamata: integration-theorem ratio suite on a fixed fixture table ----

struct KaramataCase {
    const char* label;
    CoefficientExpr L;
    double theta;
    KaramataMode mode;
    bool exact; // closed-form antiderivative, ratio must agree to 1e-8
};

std::vector<KaramataCase> karamata_cases() {
    auto L = [](std::vector<double> lp) { return CoefficientExpr::power_log(1.0, 0.0, lp); };
    return {
        {"t^2", L({}), 2.0, KaramataMode::HeadDivergent, true},
        {"t ln t", L({1.0}), 1.0, KaramataMode::HeadDivergent, false},
        {"t ln^2 t", L({2.0}), 1.0, KaramataMode::HeadDivergent, false},
        {"t^2 ln^-2 t", L({-2.0}), 2.0, KaramataMode::HeadDivergent, false},
        {"t^-2", L({}), -2.0, KaramataMode::TailConvergent, true},
        {"t^-3 ln t", L({1.0}), -3.0, KaramataMode::TailConvergent, false},
        {"t^-3 ln^2 t", L({2.0}), -3.0, KaramataMode::TailConvergent, false},
        {"t^-3 ln^-2 t", L({-2.0}), -3.0, KaramataMode::TailConvergent, false},
        {"1/t", L({}), -1.0, KaramataMode::Borderline, false},
        {"1/(t ln t)", L({-1.0}), -1.0, KaramataMode::Borderline, false},
        {"1/(t ln^2 t)", L({-2.0}), -1.0, KaramataMode::Borderline, false},
        {"1/(t ln t lnln t)", L({-1.0, -1.0}), -1.0, KaramataMode::Borderline, false},
    };
}

int cmd_karamata(const std::string& out_dir) {
    const double t_max = 1e6;
    std::string md = "# karamata integration suite\n\n"
                     "| integrand | mode | final | limit | dev | monotone | pass |\n"
                     "|---|---|---|---|---|---|---|\n";
    bool all = true;
    for (const auto& kc : karamata_cases()) {
        double lo = std::max(1.5, kc.L.min_domain_start() * 1.1);
        auto grid = geometric_grid(lo, t_max, 16);
        auto trace = karamata_check(kc.L, kc.theta, kc.mode, grid);
        double limit = kc.mode == KaramataMode::Borderline ? 0.0 : 1.0;
        double dev = std::fabs(trace.back().second - limit);
        bool monotone = true;
        double prev = -1.0;
        for (auto it = trace.rbegin(); it != trace.rend() && it->first >= t_max / 10.0; ++it) {
            double d = std::fabs(it->second - limit);
            if (prev >= 0.0 && d < prev - 1e-12) monotone = false; // increasing toward the past
            prev = d;
        }
        bool pass = monotone && dev <= (kc.exact ? 1e-8 : 0.08);
        all = all && pass;
        const char* mode = kc.mode == KaramataMode::HeadDivergent    ? "head"
                           : kc.mode == KaramataMode::TailConvergent ? "tail"
                                                                     : "borderline";
        char row[256];
        std::snprintf(row, sizeof row, "| %s | %s | %.6g | %g | %.3g | %s | %s |\n", kc.label,
                      mode, trace.back().second, limit, dev, monotone ? "yes" : "no",
                      pass ? "yes" : "no");
        md += row;
        std::printf("%-20s %-10s final=%.6g dev=%.3g %s\n", kc.label, mode, trace.back().second,
                    dev, pass ? "pass" : "FAIL");
    }
    if (!out_dir.empty()) write_file(ensure_out_dir(out_dir) / "karamata_report.md", md);
    std::printf("karamata: %s\n", all ? "pass" : "FAIL");
    return all ? 0 : 1;
}

// ---- transform: reciprocal + change-of-variables consistency ----

int cmd_transform(const CommonOpts& o) {
    Scenario sc = load_with_overrides(o);
    const HalfLinearEquation& eq = sc.equation;
    double a = eq.domain_start(), T = sc.t_end;
    Trajectory traj = solve(eq, sc.history, T, sc.solver);

    bool all = true;
    auto judge = [&all](const char* what, double value, double bound) {
        bool ok = std::isfinite(value) && value <= bound;
        all = all && ok;
        std::printf("%-28s %.6g  (bound %.3g) %s\n", what, value, bound, ok ? "pass" : "FAIL");
    };

    ReciprocalTransform rt = reciprocal_transform(eq);
    auto grid = geometric_grid(std::max(2.0 * a, traj.t_start() * 1.5), 0.9 * T, 8);
    double tol = sc.solver.tol > 0.0 ? sc.solver.tol : 1e-10;
    judge("reciprocal residual", rt.quasiderivative_residual(traj, grid), 10.0 * tol);
    if (rt.delta_tilde) {
        auto g = geometric_grid(std::max(10.0, a), 1e5 * std::max(1.0, a), 20);
        std::vector<double> ps;
        for (double t : g) ps.push_back(rt.equation.p_eval(t));
        auto est = estimate_rv_index(g, ps);
        judge("reciprocal index dev", std::fabs(est.index - *rt.delta_tilde),
              0.05 * std::max(1.0, std::fabs(*rt.delta_tilde)));
    }

    ChangeOfVariable cov = build_change_of_variable(eq.r(), eq.beta(), a, 2.0 * T);
    TransformedEquation te = change_of_variables(eq, cov);
    auto t_grid = geometric_grid(1.5 * a, 0.9 * T, 8);
    std::vector<double> s_grid;
    for (double t : t_grid) s_grid.push_back(cov.forward(t));
    bool head = cov.mode == ChangeOfVariable::Mode::HeadDivergent;
    std::printf("substitution mode: %s\n", head ? "head-divergent" : "tail-convergent");
    judge("transformed r deviation", te.r_hat_deviation(s_grid), head ? 1e-8 : 1e-6);
    judge("quasiderivative equality", te.quasiderivative_equality(traj, t_grid), 1e-6);

    std::printf("transform: %s\n", all ? "pass" : "FAIL");
    return all ? 0 : 1;
}

// ---- suite: every scenario in a directory, aggregated ----

int cmd_suite(const std::string& dir, const CommonOpts& o) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    if (ec) throw IoError("cannot read scenario directory " + dir + ": " + ec.message());
    if (files.empty()) throw ConfigError("", "no scenario files in " + dir);
    std::sort(files.begin(), files.end());

    int failed = 0;
    std::string md = "| scenario | mode | engine | class | pass |\n|---|---|---|---|---|\n";
    for (const auto& f : files) {
        Scenario sc = load_scenario(f.string());
        apply_overrides(sc, o);
        RunReport rep = run_scenario(sc);
        if (!o.out.empty()) emit_report_files(rep, o);
        print_summary(rep);
        md += "| " + rep.scenario + " | " + to_string(rep.mode) + " | " + to_string(rep.engine) +
              " | " + (rep.observed ? to_string(rep.observed->label) : std::string("-")) +
              " | " + (rep.pass ? "yes" : "no") + " |\n";
        if (!rep.pass) ++failed;
    }
    if (!o.out.empty())
        write_file(ensure_out_dir(o.out) / "suite_summary.md",
                   "# scenario suite\n\n" + md + "\nfailed: " + std::to_string(failed) + "\n");
    std::printf("suite: %zu scenarios, %d failed\n", files.size(), failed);
    return failed == 0 ? 0 : 1;
}

void add_common(CLI::App* sub, CommonOpts& o, bool needs_config) {
    if (needs_config)
        sub->add_option("--config", o.config, "scenario JSON file")->required();
    sub->add_option("--out", o.out, "artifact directory (empty string disables)");
    sub->add_option("--t-end", o.t_end, "override the scenario horizon");
    sub->add_option("--tol", o.tol, "override the solver tolerance");
    sub->add_option("--engine", o.engine, "override the engine: auto|sv|rv|gen1|gen2");
    sub->add_option("--format", o.format, "artifact format")
        ->check(CLI::IsMember({"csv", "markdown", "jsonl"}));
    sub->add_option("--set", o.sets, "override a named tolerance, key=value")
        ->take_all();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical workbench for half-linear delay differential equations"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string suite_dir = "scenarios";
    std::function<int()> action;

    auto* solve_cmd = app.add_subcommand("solve", "integrate and emit the trajectory CSV");
    add_common(solve_cmd, o, true);
    solve_cmd->callback([&] { action = [&] { return cmd_solve(o); }; });

    auto* classify_cmd = app.add_subcommand("classify", "integrate and report the solution class");
    add_common(classify_cmd, o, true);
    classify_cmd->callback([&] { action = [&] { return cmd_classify(o); }; });

    auto* verify_cmd =
        app.add_subcommand("verify", "full pipeline: hypotheses, solve, classify, formula fit");
    add_common(verify_cmd, o, true);
    verify_cmd->callback([&] { action = [&] { return cmd_verify(o); }; });

    auto* karamata_cmd =
        app.add_subcommand("karamata", "regular-variation integration-theorem suite");
    karamata_cmd->add_option("--out", o.out, "artifact directory (empty string disables)");
    karamata_cmd->callback([&] { action = [&] { return cmd_karamata(o.out); }; });

    auto* transform_cmd = app.add_subcommand(
        "transform", "reciprocal and change-of-variables consistency on a scenario");
    add_common(transform_cmd, o, true);
    transform_cmd->callback([&] { action = [&] { return cmd_transform(o); }; });

    auto* suite_cmd = app.add_subcommand("suite", "run every scenario in a directory");
    suite_cmd->add_option("--dir", suite_dir, "scenario directory")->required();
    suite_cmd->add_option("--out", o.out, "artifact directory (empty string disables)");
    suite_cmd->add_option("--format", o.format, "artifact format")
        ->check(CLI::IsMember({"csv", "markdown", "jsonl"}));
    suite_cmd->add_option("--set", o.sets, "override a named tolerance, key=value")->take_all();
    suite_cmd->callback([&] { action = [&] { return cmd_suite(suite_dir, o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
