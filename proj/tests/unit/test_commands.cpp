#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "vortex/commands.hpp"

using namespace vortex;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vortex_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<json> records(const fs::path& p) {
    std::vector<json> out;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) out.push_back(json::parse(line));
    return out;
}

// 48 x 48 resolves the seeded test fields well enough for the default tolerances.
RunConfig small(const std::string& text, const fs::path& out) {
    RunConfig run = parse_run_config("grid.n_theta = 48\ngrid.n_phi = 48\n" + text);
    run.output_dir = out.string();
    return run;
}

int run_cli(const std::string& args) {
    const char* exe = std::getenv("VORTEX_CLI");
    REQUIRE(exe != nullptr);
    const int status = std::system((std::string(exe) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("output directory precedence") {
    RunConfig run;
    ::setenv("VORTEX_OUT_DIR", "/tmp/from_env", 1);
    CHECK(resolve_output_dir("", run) == "/tmp/from_env");
    run.output_dir = "cfg_dir";
    CHECK(resolve_output_dir("", run) == "cfg_dir");
    CHECK(resolve_output_dir("flag_dir", run) == "flag_dir");
    ::unsetenv("VORTEX_OUT_DIR");
    CHECK(resolve_output_dir("", RunConfig{}) == "vortex_out");
}

TEST_CASE("verify writes deterministic records") {
    const fs::path a = scratch("verify_a"), b = scratch("verify_b");
    std::ostringstream log;
    CHECK(cmd_verify(small("config.N = 3\nconfig.ell = 1", a), log) == kExitOk);
    CHECK(cmd_verify(small("config.N = 3\nconfig.ell = 1", b), log) == kExitOk);
    CHECK(slurp(a / "verify.jsonl") == slurp(b / "verify.jsonl"));
    CHECK(slurp(a / "verify.csv") == slurp(b / "verify.csv"));
    CHECK(fs::exists(a / "meta.json"));
    CHECK(slurp(a / "verify.jsonl").find("timestamp") == std::string::npos);

    bool found = false;
    for (const json& r : records(a / "verify.jsonl")) {
        for (const char* key : {"name", "anchor", "value", "expected", "residual", "tolerance", "status"}) {
            CHECK(r.contains(key));
        }
        CHECK(r["status"] == "PASS");
        if (r["name"] == "psi0_mean") {
            found = true;
            CHECK(r["expected"].get<double>() == doctest::Approx(-pi));
        }
    }
    CHECK(found);
}

TEST_CASE("verify fails when a tolerance cannot be met") {
    const fs::path out = scratch("verify_tight");
    std::ostringstream log;
    CHECK(cmd_verify(small("tolerances.gauss_bonnet = 1e-30", out), log) == kExitCheckFailed);
    CHECK(log.str().find("FAIL") != std::string::npos);
}

TEST_CASE("futaki verdicts") {
    std::ostringstream log;
    const fs::path o1 = scratch("futaki_obstructed");
    CHECK(cmd_futaki(small("config.N = 1\nconfig.ell = 0\nseeds = 1, 2, 3", o1), false, log) == kExitOk);
    CHECK(log.str().find("OBSTRUCTED") != std::string::npos);
    const json r = records(o1 / "futaki.jsonl").at(0);
    CHECK(r["verdict"] == "OBSTRUCTED");
    CHECK(r["value"]["im"].get<double>() == doctest::Approx(24.0 * pi).epsilon(1e-8));
    CHECK(fs::exists(o1 / "futaki_samples.csv"));

    std::ostringstream log2;
    const fs::path o2 = scratch("futaki_balanced");
    CHECK(cmd_futaki(small("seeds = 1, 2", o2), false, log2) == kExitOk);
    CHECK(log2.str().find("UNOBSTRUCTED") != std::string::npos);
}

TEST_CASE("futaki sweep over ell") {
    std::ostringstream log;
    const fs::path out = scratch("futaki_sweep");
    CHECK(cmd_futaki(small("config.N = 3\nseeds = 1, 2", out), true, log) == kExitOk);
    std::istringstream csv(slurp(out / "futaki_sweep.csv"));
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4);
    CHECK(records(out / "futaki.jsonl").size() == 4u);
}

TEST_CASE("solve exit codes") {
    std::ostringstream log;
    const fs::path ok = scratch("solve_ok");
    CHECK(cmd_solve(small("", ok), log) == kExitOk);
    CHECK(fs::exists(ok / "trace.csv"));
    CHECK(fs::exists(ok / "fields.csv"));
    bool conserved = false;
    for (const json& r : records(ok / "solve.jsonl")) {
        CHECK(r["status"] == "PASS");
        if (r["name"] == "conserved_integral") {
            conserved = true;
            CHECK(r["value"].get<double>() == doctest::Approx(8.0 * pi));
        }
    }
    CHECK(conserved);

    const fs::path obstructed = scratch("solve_obstructed");
    CHECK(cmd_solve(small("config.N = 1\nconfig.ell = 0\nsolver.max_newton_iters = 4", obstructed), log) ==
          kExitObstructed);
    const json cert = records(obstructed / "solve.jsonl").at(0);
    CHECK(cert["name"] == "certificate");
    CHECK(cert["converged"] == false);
    CHECK(cert["certificate"]["im"].get<double>() == doctest::Approx(24.0 * pi));

    const fs::path refused = scratch("solve_bradlow");
    CHECK(cmd_solve(small("config.V = 8*pi", refused), log) == kExitBradlow);
    CHECK(log.str().find("margin") != std::string::npos);
}

TEST_CASE("command-line surface") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "bad.cfg") << "grid.n_theta = 4\n";
        std::ofstream(dir / "good.cfg") << "grid.n_theta = 48\ngrid.n_phi = 48\n";
    }
    CHECK(run_cli("verify --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_cli("verify --config " + (dir / "missing.cfg").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("futaki --sweep tau") == 2);
    CHECK(run_cli("verify --config " + (dir / "good.cfg").string() + " --out " + (dir / "o").string()) == 0);
    CHECK(fs::exists(dir / "o" / "verify.jsonl"));
    const std::string env_out = (dir / "env").string();
    ::setenv("VORTEX_OUT_DIR", env_out.c_str(), 1);
    CHECK(run_cli("futaki --seed 5 --config " + (dir / "good.cfg").string()) == 0);
    ::unsetenv("VORTEX_OUT_DIR");
    CHECK(fs::exists(fs::path(env_out) / "futaki.jsonl"));
}
