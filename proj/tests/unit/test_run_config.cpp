#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vortex/errors.hpp"
#include "vortex/run_config.hpp"

using namespace vortex;

TEST_CASE("expressions") {
    CHECK(evaluate_expression("16*pi") == doctest::Approx(16.0 * pi));
    CHECK(evaluate_expression(" 2 * (3 + 4) / 7 ") == doctest::Approx(2.0));
    CHECK(evaluate_expression("-pi/2") == doctest::Approx(-pi / 2.0));
    CHECK(evaluate_expression("1e-9") == 1e-9);
    CHECK(evaluate_expression("4*pi*2/1") == doctest::Approx(8.0 * pi));
    CHECK_THROWS_AS(evaluate_expression("2*"), ConfigError);
    CHECK_THROWS_AS(evaluate_expression("(1+2"), ConfigError);
    CHECK_THROWS_AS(evaluate_expression("pie"), ConfigError);
    CHECK_THROWS_AS(evaluate_expression("1/0"), ConfigError);
    CHECK_THROWS_AS(evaluate_expression(""), ConfigError);
}

TEST_CASE("defaults") {
    const RunConfig run = parse_run_config("");
    CHECK(run.config.N == 2);
    CHECK(run.config.ell == 1);
    CHECK(run.config.tau == 1.0);
    CHECK(run.config.volume == doctest::Approx(16.0 * pi));
    CHECK(run.n_theta == 64);
    CHECK(run.n_phi == 64);
    CHECK(run.seeds.size() == 10u);
    CHECK(run.tolerance("radial_match") == 1e-6);
    CHECK_THROWS_AS(run.tolerance("nope"), InvalidArgument);
}

TEST_CASE("full configuration") {
    const RunConfig run = parse_run_config(R"(
# vortex configuration
config.N = 4
config.ell = 2        # balanced
config.tau = 2
config.V = 3*pi
config.a = 1/2

grid.n_theta = 32
grid.n_phi = 48

solver.max_newton_iters = 12
solver.newton_tol = 1e-8
solver.linear_tol = 1e-9
solver.damping = 0.5
solver.continuation_steps = 2
solver.init_strategy = radial_seed

seeds = 3, 5, 8
output_dir = "runs/a"
tolerances.radial_match = 1e-5
)");
    CHECK(run.config.N == 4);
    CHECK(run.config.a == 0.5);
    CHECK(run.config.volume == doctest::Approx(3.0 * pi));
    CHECK(run.n_phi == 48);
    CHECK(run.solver.max_newton_iters == 12);
    CHECK(run.solver.damping == 0.5);
    CHECK(run.solver.continuation_steps == 2);
    CHECK(run.solver.init_strategy == InitStrategy::RadialSeed);
    CHECK(run.seeds == std::vector<std::uint64_t>{3, 5, 8});
    CHECK(run.output_dir == "runs/a");
    CHECK(run.tolerance("radial_match") == 1e-5);
}

TEST_CASE("strict mode errors") {
    CHECK_THROWS_AS(parse_run_config("config.M = 2"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("config.N = 2\nconfig.N = 3"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("config.N"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("config.N = 2.5"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("config.a = 0.3"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("config.ell = 5"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("grid.n_theta = 4"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("solver.damping = 2"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("solver.init_strategy = random"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("seeds = 1"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("seeds = 1, x"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("tolerances.unknown = 1"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("tolerances.structural = 0"), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/vortex.cfg"), ConfigError);
    try {
        parse_run_config("\n\nbogus = 1");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("seed override keeps the sample count") {
    RunConfig run = parse_run_config("seeds = 4, 9, 1");
    run.override_seed(20);
    CHECK(run.seeds == std::vector<std::uint64_t>{20, 21, 22});
}

TEST_CASE("shipped configuration files parse") {
    const std::string dir = VORTEX_CONFIG_DIR;
    const RunConfig ref = load_run_config(dir + "/reference.cfg");
    CHECK(ref.config.balanced());
    CHECK(ref.seeds.size() == 10u);
    CHECK(load_run_config(dir + "/obstructed.cfg").config.N == 1);
    CHECK(load_run_config(dir + "/bradlow_boundary.cfg").config.volume == doctest::Approx(8.0 * pi));
}
