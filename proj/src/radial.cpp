#include "vortex/radial.hpp"

#include <cmath>

#include "vortex/errors.hpp"
#include "vortex/quadrature.hpp"

namespace vortex {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Chebyshev-Lobatto points t_j = cos(pi j / (m - 1)) and their first-derivative
// matrix in t.
void chebyshev(int m, Eigen::VectorXd& t, Eigen::MatrixXd& d) {
    const int n = m - 1;
    t.resize(m);
    for (int j = 0; j < m; ++j) t[j] = std::cos(kPi * j / n);
    Eigen::VectorXd c(m);
    for (int j = 0; j < m; ++j) c[j] = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    d.setZero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i != j) d(i, j) = (c[i] / c[j]) / (t[i] - t[j]);
        }
        d(i, i) = -d.row(i).sum();
    }
}

double barycentric_weight(int j, int m) {
    const double w = (j % 2) ? -1.0 : 1.0;
    return (j == 0 || j == m - 1) ? 0.5 * w : w;
}

// Interpolation row for the point t through the Chebyshev-Lobatto nodes.
Eigen::RowVectorXd interpolation_row(const Eigen::VectorXd& nodes, double t) {
    const int m = static_cast<int>(nodes.size());
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
        if (t == nodes[j]) {
            row[j] = 1.0;
            return row;
        }
    }
    double denom = 0.0;
    for (int j = 0; j < m; ++j) {
        row[j] = barycentric_weight(j, m) / (t - nodes[j]);
        denom += row[j];
    }
    return row / denom;
}

double evaluate(const Eigen::VectorXd& y, const Eigen::VectorXd& values, double yy) {
    // Nodes are stored in y; the barycentric formula is invariant under the
    // affine map to t, so it can be applied to y directly.
    return interpolation_row(y, yy).dot(values);
}

Eigen::MatrixXd derivative_matrix_y(int m) {
    Eigen::VectorXd t;
    Eigen::MatrixXd d;
    chebyshev(m, t, d);
    // y = (1 - t) / 2
    return -2.0 * d;
}

} // namespace

double RadialProfile::f_at(double theta) const {
    const double c = std::cos(theta);
    return evaluate(y, f, c * c);
}

double RadialProfile::eta_at(double theta) const {
    const double c = std::cos(theta);
    return evaluate(y, eta, c * c);
}

double RadialProfile::df_dtheta(double theta) const {
    const double c = std::cos(theta);
    const Eigen::VectorXd df = derivative_matrix_y(static_cast<int>(y.size())) * f;
    return evaluate(y, df, c * c) * (-2.0 * c * std::sin(theta));
}

double RadialProfile::deta_dtheta(double theta) const {
    const double c = std::cos(theta);
    const Eigen::VectorXd de = derivative_matrix_y(static_cast<int>(y.size())) * eta;
    return evaluate(y, de, c * c) * (-2.0 * c * std::sin(theta));
}

RadialProfile radial_oracle(const VortexConfig& config, int n_radial, const RadialOptions& opts) {
    if (!config.balanced()) throw InvalidArgument("radial_oracle: requires N == 2 ell");
    if (n_radial < 8) throw InvalidArgument("radial_oracle: n_radial must be >= 8");

    const int m = n_radial;
    const double V = config.volume;
    const double tau2 = config.tau * config.tau;
    const double a = config.a;
    const double flux = 4.0 * kPi * config.N / V;
    const double curvature = 4.0 * kPi / V;

    Eigen::VectorXd t;
    Eigen::MatrixXd dt;
    chebyshev(m, t, dt);
    const Eigen::VectorXd y = (1.0 - t.array()) / 2.0;
    const Eigen::MatrixXd dy = -2.0 * dt;
    const Eigen::MatrixXd dyy = dy * dy;
    Eigen::MatrixXd lap(m, m);
    for (int i = 0; i < m; ++i) {
        lap.row(i) = curvature * (4.0 * y[i] * (1.0 - y[i]) * dyy.row(i) + (2.0 - 6.0 * y[i]) * dy.row(i));
    }
    const Eigen::ArrayXd phi = ((1.0 - y.array()) / 4.0).pow(config.ell);

    // Quadrature over x = cos(theta) in [0, 1]; the integrands are even in x.
    const int nq = 2 * m;
    Eigen::ArrayXd xq, wq;
    gauss_legendre(2 * nq, xq, wq);
    Eigen::MatrixXd interp(nq, m);
    Eigen::ArrayXd wpos(nq), phiq(nq);
    for (int q = 0; q < nq; ++q) {
        const double yq = xq[q] * xq[q];
        interp.row(q) = interpolation_row(y, yq);
        wpos[q] = wq[q];
        phiq[q] = std::pow((1.0 - yq) / 4.0, config.ell);
    }

    const int n = 2 * m + 1;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    const double mean_phi = (wpos * phiq).sum();
    u.head(m).setConstant(std::log(tau2) - std::log(mean_phi));

    auto residual = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd f = v.head(m), eta = v.segment(m, m);
        const double mu = v[n - 1];
        const Eigen::ArrayXd w = eta.array().exp();
        const Eigen::ArrayXd e = f.array().exp() * phi;
        Eigen::VectorXd r(n);
        r.head(m) = (lap * f).array() - w * (e - tau2) - flux;
        const Eigen::VectorXd coupled = eta + (a / tau2) * e.matrix();
        r.segment(m, m) = (lap * coupled).array() - 2.0 * curvature - a * w * (e - tau2) + mu;
        r[n - 1] = (wpos * (interp * eta).array().exp()).sum() - 1.0;
        return r;
    };

    auto jacobian = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd f = v.head(m), eta = v.segment(m, m);
        const Eigen::ArrayXd w = eta.array().exp();
        const Eigen::ArrayXd e = f.array().exp() * phi;
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
        j.block(0, 0, m, m) = lap;
        j.block(0, 0, m, m).diagonal().array() -= w * e;
        j.block(0, m, m, m).diagonal() = (-w * (e - tau2)).matrix();
        j.block(m, 0, m, m) = (a / tau2) * lap * e.matrix().asDiagonal();
        j.block(m, 0, m, m).diagonal().array() -= a * w * e;
        j.block(m, m, m, m) = lap;
        j.block(m, m, m, m).diagonal().array() -= a * w * (e - tau2);
        j.block(m, n - 1, m, 1).setOnes();
        const Eigen::ArrayXd wq_exp = wpos * (interp * eta).array().exp();
        j.block(n - 1, m, 1, m) = wq_exp.matrix().transpose() * interp;
        return j;
    };

    RadialProfile out;
    Eigen::VectorXd r = residual(u);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < opts.max_newton_iters && rnorm > opts.newton_tol; ++it) {
        const Eigen::VectorXd step = jacobian(u).fullPivLu().solve(-r);
        double lambda = 1.0;
        Eigen::VectorXd trial;
        Eigen::VectorXd rtrial;
        double tnorm = rnorm;
        for (int k = 0; k < 30; ++k) {
            trial = u + lambda * step;
            rtrial = residual(trial);
            tnorm = rtrial.lpNorm<Eigen::Infinity>();
            if (std::isfinite(tnorm) && tnorm < rnorm) break;
            lambda *= 0.5;
        }
        out.iterations = it + 1;
        if (!(std::isfinite(tnorm) && tnorm < rnorm)) break;
        const double rel_step = lambda * step.lpNorm<Eigen::Infinity>() / (1.0 + u.lpNorm<Eigen::Infinity>());
        u = trial;
        r = rtrial;
        rnorm = tnorm;
        if (rel_step < 1e-15) break;
    }

    out.y = y;
    out.f = u.head(m);
    out.eta = u.segment(m, m);
    out.multiplier = u[n - 1];
    out.residual = rnorm;
    out.converged = rnorm <= opts.newton_tol;
    const Eigen::ArrayXd etaq = (interp * out.eta).array();
    const Eigen::ArrayXd fq = (interp * out.f).array();
    out.volume = V * (wpos * etaq.exp()).sum();
    out.conserved_integral = V * (wpos * (etaq + fq).exp() * phiq).sum();
    return out;
}

} // namespace vortex
