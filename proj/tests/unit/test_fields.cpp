#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vortex/errors.hpp"
#include "vortex/fields.hpp"

using namespace vortex;

TEST_CASE("config construction enforces the quantization a = 2/N") {
    const VortexConfig c = VortexConfig::make(4, 1, 2.0, 8.0 * pi);
    CHECK(c.a == doctest::Approx(0.5));
    CHECK(VortexConfig::make(4, 1, 2.0, 8.0 * pi, 0.5).a == 0.5);
    CHECK_THROWS_AS(VortexConfig::make(4, 1, 2.0, 8.0 * pi, 0.6), InvalidArgument);
    CHECK_THROWS_AS(VortexConfig::make(0, 0, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(VortexConfig::make(2, 3, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(VortexConfig::make(2, -1, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(VortexConfig::make(2, 1, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(VortexConfig::make(2, 1, 1.0, -1.0), InvalidArgument);
    CHECK_THROWS_AS(VortexConfig::make(2, 1, 1.0, 1.0, std::nullopt, 0.0), InvalidArgument);
    CHECK(c.bradlow_margin() == doctest::Approx(8.0 * pi - 4.0 * pi));
    CHECK_FALSE(c.balanced());
    CHECK(VortexConfig::make(4, 2, 1.0, 1.0).balanced());
}

TEST_CASE("field operations reject a grid with a different volume") {
    const VortexConfig c = VortexConfig::make(2, 1, 1.0, 16.0 * pi);
    const SphereGrid g = SphereGrid::build(16, 16, 8.0 * pi);
    CHECK_THROWS_AS(require_matching_volume(c, g), InvalidArgument);
}

TEST_CASE("Higgs density and psi_0 in closed form") {
    const VortexConfig c = VortexConfig::make(3, 1, 1.0, 4.0 * pi);
    const SphereGrid g = SphereGrid::build(32, 32, c.volume);
    const Eigen::ArrayXd r2 = g.abs_z2();
    const Eigen::ArrayXd phi = r2 / (1.0 + r2).pow(3);
    CHECK((higgs_density(c, g).values - phi).abs().maxCoeff() < 1e-14);
    CHECK((higgs_density(0, 0, g).values - 1.0).abs().maxCoeff() == 0.0);
    const Eigen::ArrayXd p = 1.0 - 3.0 * r2 / (1.0 + r2);
    CHECK((psi0(c, g).values - p).abs().maxCoeff() < 1e-13);
}

TEST_CASE("psi_0 integrates to pi (2 ell - N) against omega_FS") {
    const SphereGrid g = SphereGrid::build(64, 64, 16.0 * pi);
    for (int N = 1; N <= 8; ++N) {
        for (int ell = 0; ell <= N; ++ell) {
            const VortexConfig c = VortexConfig::make(N, ell, 1.0, g.volume());
            const double value = integrate(psi0(c, g), AreaForm::FubiniStudy, g);
            CHECK(std::abs(value - pi * (2 * ell - N)) < 1e-10);
        }
    }
}

TEST_CASE("phi_0 is the height function potential") {
    const double V = 16.0 * pi;
    const SphereGrid g = SphereGrid::build(32, 32, V);
    const ComplexField p = phi_eta(ScalarField::constant(g.size(), 0.0), g);
    const Eigen::ArrayXcd expected = cdouble(0.0, -V / (4.0 * pi)) * g.cos_theta().cast<cdouble>();
    CHECK((p.values - expected).abs().maxCoeff() < 1e-12);
}

TEST_CASE("phi_eta is normalized against e^eta") {
    const SphereGrid g = SphereGrid::build(32, 32, 6.0);
    const ScalarField eta = normalize_volume(random_smooth_field(g, 5), g);
    const ComplexField p = phi_eta(eta, g);
    const cdouble moment = integrate(ComplexField(p.values * eta.values.exp().cast<cdouble>()), AreaForm::Omega0, g);
    CHECK(std::abs(moment) < 1e-12);
    CHECK(phi_eta_dbar_residual(p, eta, g, interior_band(g)) < 1e-9);
}

TEST_CASE("normalize_volume fixes the e^eta volume") {
    const SphereGrid g = SphereGrid::build(16, 16, 3.0);
    const ScalarField eta = normalize_volume(random_smooth_field(g, 11, 3, 2.0), g);
    CHECK(integrate(ScalarField(eta.values.exp()), AreaForm::Omega0, g) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("normalize_epsilon rescales the volume") {
    const double V = 4.0 * pi;
    const SphereGrid g = SphereGrid::build(16, 16, V);
    const ScalarField zero = ScalarField::constant(g.size(), 0.0);
    const NormalizedPair np = normalize_epsilon(zero, zero, 0.5, g);
    CHECK(np.volume == doctest::Approx(4.0 * V));
    CHECK(np.eta.values.abs().maxCoeff() < 1e-12);
    CHECK((np.f.values - zero.values).abs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(normalize_epsilon(zero, zero, 0.0, g), InvalidArgument);
}

TEST_CASE("structural identities hold for seeded fields") {
    const VortexConfig c = VortexConfig::make(3, 1, 1.5, 16.0 * pi);
    const SphereGrid g = SphereGrid::build(48, 48, c.volume);
    const NodeMask band = interior_band(g);
    CHECK(psi0_dbar_residual(c, g, band) < 1e-10);
    for (std::uint64_t s = 1; s <= 3; ++s) {
        const ScalarField f = random_smooth_field(g, s);
        CHECK(psi_dbar_residual(f, c, g, band) < 1e-9);
        CHECK(psi_section_residual(f, c, g, band) < 1e-9);
        CHECK(mixed_dbar_residual(f, c, g, band) < 1e-9);
    }
}

TEST_CASE("seeded random fields are deterministic and bounded") {
    const SphereGrid g = SphereGrid::build(16, 16, 1.0);
    const ScalarField a = random_smooth_field(g, 42);
    const ScalarField b = random_smooth_field(g, 42);
    const ScalarField c = random_smooth_field(g, 43);
    CHECK((a.values - b.values).abs().maxCoeff() == 0.0);
    CHECK((a.values - c.values).abs().maxCoeff() > 0.0);
    const double sup = a.values.abs().maxCoeff();
    CHECK(sup <= 1.0 + 1e-12);
    CHECK(sup >= 0.25 - 1e-12);
    const ScalarField z = random_axisymmetric_field(g, 9);
    // Zonal: constant along each ring.
    for (int i = 0; i < g.n_theta(); ++i) {
        const auto ring = z.values.segment(i * g.n_phi(), g.n_phi());
        CHECK(ring.maxCoeff() - ring.minCoeff() < 1e-12);
    }
}
