#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vortex/commands.hpp"
#include "vortex/errors.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value configuration file");
    cmd->add_option("--out", flags.out, "output directory (default: $VORTEX_OUT_DIR or ./vortex_out)");
    cmd->add_option("--seed", flags.seed, "base seed; replaces the configured seed list");
}

vortex::RunConfig prepare(const CommonFlags& flags) {
    vortex::RunConfig run =
        flags.config_path.empty() ? vortex::RunConfig{} : vortex::load_run_config(flags.config_path);
    if (flags.seed) run.override_seed(*flags.seed);
    run.output_dir = vortex::resolve_output_dir(flags.out, run);
    return run;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks and solver for gravitating vortices on the sphere"};
    app.require_subcommand(1);

    CommonFlags verify_flags, futaki_flags, solve_flags;
    std::string sweep;
    CLI::App* verify = app.add_subcommand("verify", "check identities on the configured grid");
    add_common(verify, verify_flags);
    CLI::App* futaki = app.add_subcommand("futaki", "Futaki invariance report and obstruction verdict");
    add_common(futaki, futaki_flags);
    futaki->add_option("--sweep", sweep, "sweep a parameter (only 'ell' is supported)")
        ->check(CLI::IsMember({"ell"}));
    CLI::App* solve = app.add_subcommand("solve", "solve the coupled system");
    add_common(solve, solve_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : vortex::kExitConfigError;
    }

    try {
        if (verify->parsed()) return vortex::cmd_verify(prepare(verify_flags), std::cout);
        if (futaki->parsed()) return vortex::cmd_futaki(prepare(futaki_flags), sweep == "ell", std::cout);
        return vortex::cmd_solve(prepare(solve_flags), std::cout);
    } catch (const vortex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return vortex::kExitConfigError;
    } catch (const vortex::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return vortex::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return vortex::kExitCheckFailed;
    }
}
