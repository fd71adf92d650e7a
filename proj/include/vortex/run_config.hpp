#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vortex/fields.hpp"
#include "vortex/solver.hpp"

namespace vortex {

/// Evaluates an arithmetic expression over numbers and the constant `pi`
/// with + - * / and parentheses. Throws ConfigError on malformed input.
double evaluate_expression(const std::string& text);

/// Tolerances recognised under `tolerances.<name>`, with their defaults.
const std::map<std::string, double>& default_tolerances();

struct RunConfig {
    VortexConfig config = VortexConfig::make(2, 1, 1.0, 16.0 * pi);
    int n_theta = 64;
    int n_phi = 64;
    SolveOptions solver;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string output_dir; // empty: resolved by the caller
    std::map<std::string, double> tolerances = default_tolerances();

    double tolerance(const std::string& name) const;
    /// Replaces the seed list by base, base + 1, ... keeping its length.
    void override_seed(std::uint64_t base);
};

/**
 * Parses flat `key = value` text. Keys are dotted (`grid.n_theta`), `#`
 * starts a comment, blank lines are ignored. Recognised keys:
 *
 *   config.N  config.ell  config.tau  config.V  config.a (must equal 2/N)
 *   grid.n_theta  grid.n_phi
 *   solver.max_newton_iters  solver.newton_tol  solver.linear_tol
 *   solver.damping  solver.continuation_steps  solver.init_strategy
 *   seeds (comma-separated)  output_dir  tolerances.<name>
 *
 * Unknown keys, duplicates, and invalid values throw ConfigError naming the
 * line.
 */
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

} // namespace vortex
