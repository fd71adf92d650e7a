#include "vortex/gmres.hpp"

#include <cmath>
#include <vector>

namespace vortex {

KrylovStats gmres(const LinearOperator& op, const LinearOperator& precond, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, double rtol, int restart, int max_iters) {
    const Eigen::Index n = b.size();
    x = Eigen::VectorXd::Zero(n);
    KrylovStats stats;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        stats.converged = true;
        return stats;
    }
    restart = std::max(1, restart);

    Eigen::VectorXd r = b;
    Eigen::VectorXd w(n), z(n), ax(n);
    std::vector<Eigen::VectorXd> basis;
    Eigen::MatrixXd h;
    Eigen::VectorXd cs, sn, g;

    while (stats.iterations < max_iters) {
        const double beta = r.norm();
        stats.relative_residual = beta / bnorm;
        if (stats.relative_residual <= rtol) {
            stats.converged = true;
            return stats;
        }
        basis.assign(1, r / beta);
        h.setZero(restart + 1, restart);
        cs.setZero(restart);
        sn.setZero(restart);
        g.setZero(restart + 1);
        g[0] = beta;

        int k = 0;
        for (; k < restart && stats.iterations < max_iters; ++k) {
            ++stats.iterations;
            precond(basis[k], z);
            op(z, w);
            // Modified Gram-Schmidt.
            for (int i = 0; i <= k; ++i) {
                h(i, k) = w.dot(basis[i]);
                w -= h(i, k) * basis[i];
            }
            h(k + 1, k) = w.norm();
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
                h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
                h(i, k) = t;
            }
            const double denom = std::hypot(h(k, k), h(k + 1, k));
            cs[k] = denom == 0.0 ? 1.0 : h(k, k) / denom;
            sn[k] = denom == 0.0 ? 0.0 : h(k + 1, k) / denom;
            const double hk1 = h(k + 1, k);
            h(k, k) = cs[k] * h(k, k) + sn[k] * hk1;
            h(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];

            const bool happy = hk1 <= 1e-14 * beta;
            if (!happy) basis.push_back(w / hk1);
            if (std::abs(g[k + 1]) / bnorm <= rtol || happy) {
                ++k;
                break;
            }
        }

        // Back substitution on the k x k triangle.
        Eigen::VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        Eigen::VectorXd update = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < k; ++i) update += y[i] * basis[i];
        precond(update, z);
        x += z;

        op(x, ax);
        r = b - ax;
    }
    stats.relative_residual = r.norm() / bnorm;
    stats.converged = stats.relative_residual <= rtol;
    return stats;
}

} // namespace vortex
