// Scenario orchestration (solve -> classify -> check -> verify) and the
// deterministic artifact renderers. Reports render even when a stage threw;
// the error lands in the report and pass stays false.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hldde/scenario.hpp"

namespace hldde {

struct MetricRow {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note; // what the row measures
};

struct RunReport {
    std::string scenario;
    RunMode mode = RunMode::Verify;
    EngineChoice engine = EngineChoice::Auto; // resolved choice
    std::optional<HypothesisReport> hypotheses;
    std::optional<SolutionClass> observed;
    std::optional<AsymptoticFit> fit;
    std::optional<Trajectory> trajectory;
    std::vector<MetricRow> metrics;
    std::string error; // first stage failure, verbatim
    bool pass = false;
    double wall_seconds = 0.0; // console display only, never rendered into artifacts
};

// Runs the scenario in its declared mode. Overall pass requires no stage
// error, the predicted class to match the observed one (verify mode) and
// every metric row within its threshold.
RunReport run_scenario(const Scenario& sc);

// Renderers are byte-deterministic: trace data at 17 significant digits,
// summary tables at 6, C locale formatting, no timing.
std::string trajectory_csv(const Trajectory& traj);
std::string report_markdown(const RunReport& rep);
std::string report_jsonl(const RunReport& rep); // one object per trace point
std::string metrics_csv(const RunReport& rep);

} // namespace hldde
