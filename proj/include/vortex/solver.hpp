#pragma once

#include <string>
#include <vector>

#include "vortex/fields.hpp"
#include "vortex/grid.hpp"

namespace vortex {

enum class InitStrategy { Flat, RadialSeed };

/// Parses "flat" / "radial_seed"; throws InvalidArgument otherwise.
InitStrategy parse_init_strategy(const std::string& name);
std::string to_string(InitStrategy s);

struct SolveOptions {
    int max_newton_iters = 40;
    /// Bound on the sup-norms of both residuals at the nodes.
    double newton_tol = 1e-9;
    /// Relative residual requested from the inner Krylov solve.
    double linear_tol = 1e-10;
    /// Initial step length of the line search, in (0, 1].
    double damping = 1.0;
    /// Number of intermediate volumes on the path from 2V down to V.
    int continuation_steps = 0;
    InitStrategy init_strategy = InitStrategy::Flat;
    int krylov_restart = 60;
    int krylov_max_iters = 400;
    /// Collocation nodes for the radial seed; 0 picks a size from the grid.
    int radial_nodes = 0;

    /// Throws InvalidArgument on non-positive tolerances, damping outside
    /// (0, 1], or negative counts.
    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    double volume = 0.0;     // continuation stage
    double residual_1 = 0.0; // nodal sup-norms after the step
    double residual_2 = 0.0;
    double merit = 0.0;      // quadrature L2 norm of the projected system
    double step_length = 0.0;
    int krylov_iterations = 0;
    double krylov_residual = 0.0;
};

struct SolveResult {
    ScalarField f;
    ScalarField eta;
    double residual_1 = 0.0;
    double residual_2 = 0.0;
    double multiplier = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
    double volume = 0.0;             // int e^eta omega_0
    double conserved_integral = 0.0; // int e^{eta + f} Phi omega_0
    double conserved_target = 0.0;   // tau^2 V - 4 pi N
    cdouble futaki_at_solution{0.0, 0.0};
    /// Closed-form Futaki value; nonzero certifies that no solution exists.
    cdouble certificate{0.0, 0.0};
    bool obstructed = false;
    std::vector<IterationRecord> history;
};

/// tau^2 V - 4 pi N.
double bradlow_check(const VortexConfig& config);

struct Residuals {
    ScalarField r1; // Laplacian f - e^eta (e^f Phi - tau^2) - 4 pi N / V
    ScalarField r2; // Laplacian(eta + (a/tau^2) e^f Phi) - 2K - a e^eta (e^f Phi - tau^2)
};

Residuals residuals(const ScalarField& f, const ScalarField& eta, const VortexConfig& config,
                    const SphereGrid& grid);

/// Directional derivative of residuals() at (f, eta) along (df, deta).
Residuals linearized_residuals(const ScalarField& f, const ScalarField& eta, const ScalarField& df,
                               const ScalarField& deta, const VortexConfig& config,
                               const SphereGrid& grid);

/**
 * Damped Newton-Krylov solve of the coupled system at epsilon = 1.
 *
 * Unknowns are band-limited (f, eta) plus a scalar multiplier that absorbs
 * the one linear relation between the integrated equations; eta is held at
 * int e^eta omega_0 = V by an extra row and renormalized after every step.
 * For N = 2 ell, Newton corrections are symmetrized under z -> 1/conj(z),
 * which removes the kernel generated by dilations.
 *
 * Throws BradlowRefusal when tau^2 V - 4 pi N is not positive. Non-convergence
 * is reported through SolveResult::converged, never as a nonexistence claim;
 * the certificate field carries the closed-form Futaki value.
 */
SolveResult solve_coupled(const VortexConfig& config, const SphereGrid& grid,
                          const SolveOptions& opts = {});

} // namespace vortex
