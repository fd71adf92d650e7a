#include "vortex/fields.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vortex/errors.hpp"

namespace vortex {

VortexConfig VortexConfig::make(int N, int ell, double tau, double volume, std::optional<double> a,
                                double epsilon) {
    if (N < 1) throw InvalidArgument("vortex number N must be a positive integer");
    if (ell < 0 || ell > N) {
        throw InvalidArgument("multiplicity ell must satisfy 0 <= ell <= N (got ell=" +
                              std::to_string(ell) + ", N=" + std::to_string(N) + ")");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive");
    if (!(volume > 0.0) || !std::isfinite(volume)) throw InvalidArgument("volume V must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
    const double quantized = 2.0 / N;
    if (a && std::abs(*a - quantized) > 1e-12 * quantized) {
        throw InvalidArgument("coupling a must equal 2/N = " + std::to_string(quantized) +
                              " (got " + std::to_string(*a) + ")");
    }
    VortexConfig c;
    c.N = N;
    c.ell = ell;
    c.tau = tau;
    c.volume = volume;
    c.a = quantized;
    c.epsilon = epsilon;
    return c;
}

double VortexConfig::bradlow_margin() const { return volume - 4.0 * pi * N / (tau * tau); }

void require_matching_volume(const VortexConfig& config, const SphereGrid& grid) {
    if (std::abs(config.volume - grid.volume()) > 1e-12 * config.volume) {
        throw InvalidArgument("grid volume " + std::to_string(grid.volume()) +
                              " does not match configuration volume " +
                              std::to_string(config.volume));
    }
}

ScalarField higgs_density(int N, int ell, const SphereGrid& grid) {
    if (N < 0 || ell < 0 || ell > N) throw InvalidArgument("higgs_density: need 0 <= ell <= N");
    // |z|^2 / (1 + |z|^2) = (1 - x) / 2,  1 / (1 + |z|^2) = (1 + x) / 2
    const Eigen::ArrayXd to_zero = (1.0 - grid.cos_theta()) / 2.0;
    const Eigen::ArrayXd to_inf = (1.0 + grid.cos_theta()) / 2.0;
    return ScalarField(to_zero.pow(double(ell)) * to_inf.pow(double(N - ell)));
}

ScalarField higgs_density(const VortexConfig& config, const SphereGrid& grid) {
    return higgs_density(config.N, config.ell, grid);
}

ScalarField psi0(const VortexConfig& config, const SphereGrid& grid) {
    return ScalarField(config.ell - config.N * (1.0 - grid.cos_theta()) / 2.0);
}

ComplexField psi_f(const ScalarField& f, const VortexConfig& config, const SphereGrid& grid) {
    ComplexField out = vfield_derivative(f, grid);
    out.values += psi0(config, grid).values.cast<cdouble>();
    return out;
}

ComplexField phi_eta(const ScalarField& eta, const SphereGrid& grid) {
    const ScalarField weight(eta.values.exp());
    ComplexField rhs = vfield_derivative(weight, grid);
    rhs.values += (grid.cos_theta() * weight.values).cast<cdouble>();
    rhs.values *= cdouble(0.0, 2.0);
    ComplexField w = poisson_solve_g0(rhs, grid);
    const cdouble moment =
        integrate(ComplexField(w.values * weight.values.cast<cdouble>()), AreaForm::Omega0, grid);
    const double mass = integrate(weight, AreaForm::Omega0, grid);
    w.values -= moment / mass;
    return w;
}

NormalizedPair normalize_epsilon(const ScalarField& f, const ScalarField& eta, double epsilon,
                                 const SphereGrid& grid) {
    if (!(epsilon > 0.0)) throw InvalidArgument("normalize_epsilon: epsilon must be positive");
    const double v_new = integrate(ScalarField(eta.values.exp()), AreaForm::Omega0, grid) /
                         (epsilon * epsilon);
    const double shift = -2.0 * std::log(epsilon) - std::log(v_new / grid.volume());
    return NormalizedPair{f, ScalarField(eta.values + shift), v_new};
}

ScalarField normalize_volume(const ScalarField& eta, const SphereGrid& grid) {
    const double vol = integrate(ScalarField(eta.values.exp()), AreaForm::Omega0, grid);
    return ScalarField(eta.values + std::log(grid.volume() / vol));
}

// ---------------------------------------------------------------------------

NodeMask interior_band(const SphereGrid& grid) { return colatitude_band(grid, 0.1 * pi, 0.9 * pi); }

namespace {

// max over mask of |num / conj(z)|: recovers the d conj(z) coefficient from
// conj(z) times it.
double max_dzbar_coefficient(const Eigen::ArrayXcd& num, const SphereGrid& grid,
                             const NodeMask& mask) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < num.size(); ++k) {
        if (!mask[k]) continue;
        worst = std::max(worst, std::abs(num[k]) / std::abs(grid.z()[k]));
    }
    return worst;
}

// |z|^2 d_z d_zbar = (V / 16 pi) sin^2(theta) Laplacian
Eigen::ArrayXd s_ddbar_factor(const SphereGrid& grid) {
    return grid.volume() / (16.0 * pi) * grid.sin_theta().square();
}

} // namespace

double psi0_dbar_residual(const VortexConfig& config, const SphereGrid& grid, const NodeMask& mask) {
    const ComplexField zb = conj_vfield_derivative(ComplexField(psi0(config, grid)), grid);
    // conj(z) * (i N iota_v omega_FS) = -N |z|^2 / (1 + |z|^2)^2 = -N sin^2 / 4
    const Eigen::ArrayXcd diff = zb.values + (config.N * grid.sin_theta().square() / 4.0).cast<cdouble>();
    return max_dzbar_coefficient(diff, grid, mask);
}

double psi_dbar_residual(const ScalarField& f, const VortexConfig& config, const SphereGrid& grid,
                         const NodeMask& mask) {
    require_matching_volume(config, grid);
    const ComplexField zb = conj_vfield_derivative(psi_f(f, config, grid), grid);
    const ScalarField lap = laplacian_g0(f, grid);
    // |z|^2 d dbar log h
    const Eigen::ArrayXd s_ddbar_log_h =
        s_ddbar_factor(grid) * lap.values - config.N * grid.sin_theta().square() / 4.0;
    return max_dzbar_coefficient(zb.values - s_ddbar_log_h.cast<cdouble>(), grid, mask);
}

double psi_section_residual(const ScalarField& f, const VortexConfig& config,
                            const SphereGrid& grid, const NodeMask& mask) {
    const ScalarField phi = higgs_density(config, grid);
    const ScalarField density(f.values.exp() * phi.values);
    // iota_v (d phi + (d log h) phi) h conj(phi) = z d_z (e^f Phi)
    const ComplexField lhs = vfield_derivative(density, grid);
    const ComplexField psi = psi_f(f, config, grid);
    const Eigen::ArrayXcd diff = lhs.values - psi.values * density.values.cast<cdouble>();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.size(); ++k) {
        if (!mask[k]) continue;
        const cdouble zb = std::conj(grid.z()[k]);
        const cdouble h_conj_phi = std::exp(f.values[k]) *
                                   std::pow(1.0 + grid.abs_z2()[k], -double(config.N)) *
                                   std::pow(zb, config.ell);
        worst = std::max(worst, std::abs(diff[k] / h_conj_phi));
    }
    return worst;
}

double mixed_dbar_residual(const ScalarField& f, const VortexConfig& config, const SphereGrid& grid,
                           const NodeMask& mask) {
    require_matching_volume(config, grid);
    const double tau2 = config.tau * config.tau;
    const ScalarField density(f.values.exp() * higgs_density(config, grid).values);
    const ComplexField psi = psi_f(f, config, grid);
    const ComplexField product(psi.values * (density.values - tau2).cast<cdouble>());
    const ComplexField zb = conj_vfield_derivative(product, grid);
    const Eigen::ArrayXd factor = s_ddbar_factor(grid);
    const Eigen::ArrayXd s_ddbar_density = factor * laplacian_g0(density, grid).values;
    const Eigen::ArrayXd s_ddbar_log_h =
        factor * laplacian_g0(f, grid).values - config.N * grid.sin_theta().square() / 4.0;
    const Eigen::ArrayXd rhs = s_ddbar_density - tau2 * s_ddbar_log_h;
    return max_dzbar_coefficient(zb.values - rhs.cast<cdouble>(), grid, mask);
}

double phi_eta_dbar_residual(const ComplexField& phi, const ScalarField& eta,
                             const SphereGrid& grid, const NodeMask& mask) {
    const ComplexField zb = conj_vfield_derivative(phi, grid);
    // conj(z) * e^eta i z rho / 2 = i (V / 8 pi) sin^2(theta) e^eta
    const Eigen::ArrayXd target = grid.volume() / (8.0 * pi) * grid.sin_theta().square() * eta.values.exp();
    return max_dzbar_coefficient(zb.values - cdouble(0.0, 1.0) * target.cast<cdouble>(), grid, mask);
}

// ---------------------------------------------------------------------------

namespace {

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    // [0, 1) with 53 random bits; independent of the standard library's
    // distribution implementation.
    double next() { return double(engine_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * next() - 1.0; }

private:
    std::mt19937_64 engine_;
};

ScalarField random_field(const SphereGrid& grid, std::uint64_t seed, int max_degree,
                         double amplitude, bool zonal) {
    if (max_degree < 1 || max_degree > grid.max_degree()) {
        throw InvalidArgument("random field degree outside the grid band");
    }
    Uniform rng(seed);
    Spectrum s = grid.zero_spectrum();
    const int max_m = zonal ? 0 : std::min(max_degree, grid.max_order());
    for (int l = 1; l <= max_degree; ++l) {
        for (int m = 0; m <= std::min(l, max_m); ++m) {
            const double re = rng.symmetric();
            const double im = m == 0 ? 0.0 : rng.symmetric();
            s.coeffs(l, m) = cdouble(re, im) / double(l);
        }
    }
    Eigen::ArrayXd v = grid.synthesize(s);
    const double sup = v.abs().maxCoeff();
    const double target = amplitude * (0.25 + 0.75 * rng.next());
    if (sup > 0.0) v *= target / sup;
    return ScalarField(std::move(v));
}

} // namespace

ScalarField random_smooth_field(const SphereGrid& grid, std::uint64_t seed, int max_degree,
                                double amplitude) {
    return random_field(grid, seed, max_degree, amplitude, false);
}

ScalarField random_axisymmetric_field(const SphereGrid& grid, std::uint64_t seed, int max_degree,
                                      double amplitude) {
    return random_field(grid, seed, max_degree, amplitude, true);
}

} // namespace vortex
