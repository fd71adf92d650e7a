#include "vortex/futaki.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

void require_volume(const ScalarField& eta, const SphereGrid& grid, double volume_tol) {
    const double vol = integrate(ScalarField(eta.values.exp()), AreaForm::Omega0, grid);
    if (std::abs(vol - grid.volume()) > volume_tol * grid.volume()) {
        std::ostringstream msg;
        msg << "volume constraint violated: int e^eta omega_0 = " << vol << ", expected "
            << grid.volume();
        throw VolumeConstraintError(msg.str(), vol, grid.volume());
    }
}

} // namespace

cdouble classical_futaki(const ScalarField& eta, const SphereGrid& grid, double volume_tol) {
    require_volume(eta, grid, volume_tol);
    const double curvature = 4.0 * pi / grid.volume();
    const ComplexField potential = phi_eta(eta, grid);
    const Eigen::ArrayXd bracket = 2.0 * curvature - laplacian_g0(eta, grid).values;
    return -integrate(ComplexField(potential.values * bracket.cast<cdouble>()), AreaForm::Omega0, grid);
}

cdouble emh_futaki(const ScalarField& eta, const ScalarField& f, const VortexConfig& config,
                   const SphereGrid& grid, double volume_tol) {
    require_matching_volume(config, grid);
    require_volume(eta, grid, volume_tol);
    const double tau2 = config.tau * config.tau;
    const double a = config.a;
    const double flux = 4.0 * pi * config.N / grid.volume();
    const double curvature = 4.0 * pi / grid.volume();

    const Eigen::ArrayXd density = f.values.exp() * higgs_density(config, grid).values;
    const Eigen::ArrayXd lap_f = laplacian_g0(f, grid).values;
    const Eigen::ArrayXd source = eta.values.exp() * (density - tau2);

    // First equation, moved to one side.
    const Eigen::ArrayXd first = flux - lap_f + source;
    const ScalarField coupled(eta.values + (a / tau2) * density);
    const Eigen::ArrayXd second =
        2.0 * curvature - laplacian_g0(coupled, grid).values - a * (flux - lap_f);

    const ComplexField psi = psi_f(f, config, grid);
    const ComplexField potential = phi_eta(eta, grid);
    const cdouble term1 =
        integrate(ComplexField(psi.values * first.cast<cdouble>()), AreaForm::Omega0, grid);
    const cdouble term2 =
        integrate(ComplexField(potential.values * second.cast<cdouble>()), AreaForm::Omega0, grid);
    return cdouble(0.0, 2.0 * a / tau2) * term1 - term2;
}

cdouble emh_futaki_closed(const VortexConfig& config) {
    const double margin = config.volume - 4.0 * pi * config.N / (config.tau * config.tau);
    return cdouble(0.0, config.a * margin * double(config.N - 2 * config.ell));
}

double obstruction_threshold(const VortexConfig& config) {
    return 1e-9 * config.a * config.volume * std::max(1.0, 1.0 / (config.tau * config.tau));
}

FutakiReport invariance_report(const VortexConfig& config, const SphereGrid& grid, int n_samples,
                               std::uint64_t seed, const FutakiOptions& opts) {
    if (n_samples < 2) throw InvalidArgument("invariance_report: n_samples must be >= 2");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < n_samples; ++i) seeds.push_back(seed + static_cast<std::uint64_t>(i));
    return invariance_report(config, grid, seeds, opts);
}

FutakiReport invariance_report(const VortexConfig& config, const SphereGrid& grid,
                               const std::vector<std::uint64_t>& seeds, const FutakiOptions& opts) {
    if (seeds.size() < 2) throw InvalidArgument("invariance_report: need at least two seeds");
    require_matching_volume(config, grid);

    FutakiReport report;
    report.closed_form = emh_futaki_closed(config);
    report.obstruction_threshold = obstruction_threshold(config);
    report.obstructed = std::abs(report.closed_form) > report.obstruction_threshold;
    report.tolerance = opts.invariance_tol * std::max(1.0, std::abs(report.closed_form));

    const ScalarField zero = ScalarField::constant(grid.size(), 0.0);
    report.samples.push_back({"zero", emh_futaki(zero, zero, config, grid, opts.volume_tol)});
    for (const std::uint64_t s : seeds) {
        // Distinct streams for eta and f.
        const ScalarField eta =
            normalize_volume(random_smooth_field(grid, 2 * s + 1, opts.field_degree), grid);
        const ScalarField f = random_smooth_field(grid, 2 * s + 2, opts.field_degree);
        report.samples.push_back(
            {"seed=" + std::to_string(s), emh_futaki(eta, f, config, grid, opts.volume_tol)});
    }

    cdouble sum = 0.0;
    for (const auto& a : report.samples) {
        sum += a.value;
        report.max_real_part = std::max(report.max_real_part, std::abs(a.value.real()));
        for (const auto& b : report.samples) {
            report.max_spread = std::max(report.max_spread, std::abs(a.value - b.value));
        }
    }
    report.value = sum / double(report.samples.size());
    report.pass = report.max_spread <= report.tolerance &&
                  std::abs(report.value - report.closed_form) <= report.tolerance &&
                  report.max_real_part <= report.tolerance;
    return report;
}

double poincare_lelong_residual(int N, int ell, const SphereGrid& grid, const NodeMask& band) {
    if (N < 0 || ell < 0 || ell > N) throw InvalidArgument("poincare_lelong: need 0 <= ell <= N");
    // Phi = A^ell B^(N - ell) with A = |z|^2/(1+|z|^2) vanishing at z = 0 and
    // B = 1/(1+|z|^2) vanishing at infinity, so
    //   Laplacian log Phi = ell Laplacian log A + (N - ell) Laplacian log B,
    // with the quotient rule applied to the degree-one factors only.
    const ScalarField lap_log_a = log_laplacian(higgs_density(1, 1, grid), grid, band);
    const ScalarField lap_log_b = log_laplacian(higgs_density(1, 0, grid), grid, band);
    const double expected = -4.0 * pi * N / grid.volume();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < band.size(); ++k) {
        if (!band[k]) continue;
        const double lap = ell * lap_log_a.values[k] + (N - ell) * lap_log_b.values[k];
        worst = std::max(worst, std::abs(lap - expected));
    }
    return worst;
}

double poincare_lelong_check(const VortexConfig& config, const SphereGrid& grid,
                             const NodeMask& band) {
    require_matching_volume(config, grid);
    return poincare_lelong_residual(config.N, config.ell, grid, band);
}

double poincare_lelong_check(const VortexConfig& config, const SphereGrid& grid) {
    return poincare_lelong_check(config, grid, pole_excluded_band(grid));
}

} // namespace vortex
