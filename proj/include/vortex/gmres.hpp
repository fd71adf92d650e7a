#pragma once

#include <functional>

#include <Eigen/Dense>

namespace vortex {

/// out = A * in
using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct KrylovStats {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Restarted GMRES with right preconditioning, x0 = 0. Solves A M^{-1} y = b,
/// x = M^{-1} y, stopping when ||b - A x|| <= rtol ||b||.
KrylovStats gmres(const LinearOperator& op, const LinearOperator& precond, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, double rtol, int restart, int max_iters);

} // namespace vortex
