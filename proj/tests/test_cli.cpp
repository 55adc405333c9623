#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/stat.h>
#include <sys/wait.h>

// End-to-end checks of the command-line tool: exit codes, emitted files,
// summary lines. The binary path and the scenario directory arrive through
// the environment so the test works from any build layout.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

std::string cli_path() {
    const char* p = std::getenv("HLDDE_CLI");
    REQUIRE_MESSAGE(p, "HLDDE_CLI must point at the built binary");
    return p;
}

std::string scenario_dir() {
    const char* p = std::getenv("HLDDE_SCENARIOS");
    REQUIRE_MESSAGE(p, "HLDDE_SCENARIOS must point at the bundled scenarios");
    return p;
}

RunResult run_cli(const std::string& args) {
    RunResult res;
    std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) res.output += buf;
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string fresh_dir() {
    char tmpl[] = "/tmp/hldde_cli_test_XXXXXX";
    char* d = mkdtemp(tmpl);
    REQUIRE(d);
    return d;
}

bool file_exists(const std::string& path) {
    struct stat st;
    return stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("solve emits a trajectory and exits clean") {
    std::string out = fresh_dir();
    auto res = run_cli("solve --config " + scenario_dir() + "/manufactured_power.json --out " + out);
    CHECK(res.exit_code == 0);
    std::string csv = slurp(out + "/manufactured_power_trajectory.csv");
    CHECK(csv.rfind("t,y,y_prime,quasi\n", 0) == 0);
}

TEST_CASE("classify prints the label") {
    std::string out = fresh_dir();
    auto res = run_cli("classify --config " + scenario_dir() + "/gauss_decay.json --out " + out);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("class=D") != std::string::npos);
}

TEST_CASE("verify writes the report and respects format selection") {
    std::string out = fresh_dir();
    auto res =
        run_cli("verify --config " + scenario_dir() + "/rv_superlinear.json --out " + out);
    CHECK(res.exit_code == 0);
    CHECK(file_exists(out + "/rv_superlinear_report.md"));

    auto res2 = run_cli("verify --config " + scenario_dir() +
                        "/rv_superlinear.json --format jsonl --out " + out);
    CHECK(res2.exit_code == 0);
    CHECK(file_exists(out + "/rv_superlinear_trace.jsonl"));

    auto res3 = run_cli("verify --config " + scenario_dir() +
                        "/rv_superlinear.json --format csv --out " + out);
    CHECK(res3.exit_code == 0);
    std::string mc = slurp(out + "/rv_superlinear_metrics.csv");
    CHECK(mc.rfind("metric,value,threshold,pass\n", 0) == 0);
}

TEST_CASE("an impossible tolerance fails the run but still emits the report") {
    std::string out = fresh_dir();
    auto res = run_cli("verify --config " + scenario_dir() +
                       "/rv_superlinear.json --set final_ratio_band=1e-9 --out " + out);
    CHECK(res.exit_code == 1);
    CHECK(file_exists(out + "/rv_superlinear_report.md"));
    CHECK(res.output.find("final_ratio_dev") != std::string::npos);
}

TEST_CASE("configuration problems exit with code 2") {
    CHECK(run_cli("verify --config /nonexistent/nope.json").exit_code == 2);

    std::string out = fresh_dir();
    std::ofstream(out + "/broken.json") << "{ \"name\": \"x\", oops";
    auto res = run_cli("verify --config " + out + "/broken.json");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("broken.json") != std::string::npos);

    std::ofstream(out + "/badfield.json") << R"({"name":"x","equation":{"alpha":2,"r":1,"p":1,
        "delay":{"kind":"shift","amount":0},"a":1},
        "history":{"kind":"power","exponent":1},"t_end":9,"surprise":1})";
    auto res2 = run_cli("verify --config " + out + "/badfield.json");
    CHECK(res2.exit_code == 2);
    CHECK(res2.output.find("surprise") != std::string::npos);

    CHECK(run_cli("verify --config " + scenario_dir() +
                  "/rv_superlinear.json --set final_ratio_band=abc")
              .exit_code == 2);
    CHECK(run_cli("--frobnicate").exit_code == 2);
}

TEST_CASE("unwritable output directory exits with code 3") {
    std::string out = fresh_dir();
    std::ofstream(out + "/blocker") << "";
    auto res = run_cli("solve --config " + scenario_dir() +
                       "/manufactured_power.json --out " + out + "/blocker/sub");
    CHECK(res.exit_code == 3);
}

TEST_CASE("suite runs every bundled scenario") {
    std::string out = fresh_dir();
    auto res = run_cli("suite --dir " + scenario_dir() + " --out " + out);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("0 failed") != std::string::npos);
    CHECK(file_exists(out + "/suite_summary.md"));
    // per-scenario artifacts land next to the summary
    CHECK(file_exists(out + "/sv_saturating_report.md"));
}
