#pragma once

#include <Eigen/Dense>

#include "vortex/fields.hpp"

namespace vortex {

/**
 * Axisymmetric, reflection-symmetric solution of the coupled system for a
 * balanced configuration (N = 2 ell), computed independently of the sphere
 * grid: both unknowns are polynomials in y = cos^2(theta), collocated at
 * Chebyshev-Lobatto points of [0, 1] and solved by dense Newton. In y the
 * Laplacian of g_0 reads (4 pi / V) [4 y (1 - y) d_yy + (2 - 6 y) d_y], which
 * needs no boundary conditions at the poles (y = 1) or the equator (y = 0).
 */
struct RadialProfile {
    Eigen::VectorXd y;   // collocation nodes, ascending from the equator
    Eigen::VectorXd f;
    Eigen::VectorXd eta;
    double multiplier = 0.0; // bordering unknown absorbing the integral identity
    double residual = 0.0;   // sup-norm of the collocation residuals
    double volume = 0.0;     // int e^eta omega_0
    double conserved_integral = 0.0; // int e^{eta + f} Phi omega_0
    int iterations = 0;
    bool converged = false;

    double f_at(double theta) const;
    double eta_at(double theta) const;
    /// d f / d theta of the interpolant.
    double df_dtheta(double theta) const;
    double deta_dtheta(double theta) const;
};

struct RadialOptions {
    int max_newton_iters = 60;
    double newton_tol = 1e-10;
};

/// Throws InvalidArgument unless N == 2 ell, or if n_radial < 8.
RadialProfile radial_oracle(const VortexConfig& config, int n_radial, const RadialOptions& opts = {});

} // namespace vortex
