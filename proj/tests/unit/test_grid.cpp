#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vortex/errors.hpp"
#include "vortex/fields.hpp"
#include "vortex/grid.hpp"
#include "vortex/quadrature.hpp"

using namespace vortex;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
    Eigen::ArrayXd x, w;
    gauss_legendre(12, x, w);
    CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k <= 23; ++k) {
        const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
        CHECK(std::abs((w * x.pow(k)).sum() - exact) < 1e-13);
    }
    for (int i = 0; i < 12; ++i) CHECK(x[i] == -x[11 - i]);
}

TEST_CASE("grid construction validates its arguments") {
    CHECK_THROWS_AS(SphereGrid::build(4, 16, 1.0), InvalidArgument);
    CHECK_THROWS_AS(SphereGrid::build(16, 7, 1.0), InvalidArgument);
    CHECK_THROWS_AS(SphereGrid::build(16, 16, 0.0), InvalidArgument);
    const SphereGrid g = SphereGrid::build(16, 32, 3.0);
    CHECK(g.size() == 16u * 32u);
    CHECK(g.volume() == 3.0);
    CHECK(g.with_volume(7.0).volume() == 7.0);
}

TEST_CASE("quadrature reproduces the area forms") {
    const double V = 16.0 * pi;
    const SphereGrid g = SphereGrid::build(64, 64, V);
    const ScalarField one = ScalarField::constant(g.size(), 1.0);
    CHECK(std::abs(integrate(one, AreaForm::Omega0, g) - V) < 1e-12 * V);
    CHECK(std::abs(integrate(one, AreaForm::FubiniStudy, g) - 2.0 * pi) < 1e-12);
    // Archimedes: the height function integrates to zero, its square to V/3.
    const ScalarField x2(g.cos_theta().square());
    CHECK(std::abs(integrate(x2, AreaForm::Omega0, g) - V / 3.0) < 1e-12 * V);
}

TEST_CASE("chart quantities are consistent") {
    const SphereGrid g = SphereGrid::build(32, 32, 4.0 * pi);
    const Eigen::ArrayXd expected = (1.0 - g.cos_theta()) / (1.0 + g.cos_theta());
    CHECK((g.abs_z2() - expected).abs().maxCoeff() < 1e-12);
    CHECK((g.z().abs2() - g.abs_z2()).abs().maxCoeff() < 1e-12);
    const Eigen::ArrayXd rho = (g.volume() / pi) / (1.0 + g.abs_z2()).square();
    CHECK((g.conformal_factor() - rho).abs().maxCoeff() < 1e-12 * rho.maxCoeff());
    for (std::size_t k = 0; k < g.size(); k += 37) {
        CHECK(g.mirror(g.mirror(k)) == k);
        CHECK(g.cos_theta()[g.mirror(k)] == doctest::Approx(-g.cos_theta()[k]));
    }
}

TEST_CASE("Laplacian acts on spherical harmonics by -l(l+1) 4 pi / V") {
    const double V = 10.0;
    const SphereGrid g = SphereGrid::build(32, 32, V);
    const Eigen::ArrayXd x = g.cos_theta();
    const Eigen::ArrayXd s = g.sin_theta();
    // Degree 2: 3x^2 - 1 and degree 1 with order 1: sin(theta) cos(phi).
    const ScalarField p2(3.0 * x.square() - 1.0);
    const ScalarField y11(s * g.phi().cos());
    const double k = 4.0 * pi / V;
    CHECK((laplacian_g0(p2, g).values + 6.0 * k * p2.values).abs().maxCoeff() < 1e-10);
    CHECK((laplacian_g0(y11, g).values + 2.0 * k * y11.values).abs().maxCoeff() < 1e-10);
}

TEST_CASE("Poisson solve inverts the Laplacian on zero-mean data") {
    const SphereGrid g = SphereGrid::build(32, 32, 5.0);
    const ScalarField u = random_smooth_field(g, 7, 4);
    const ScalarField u0(u.values - (g.weights() * u.values).sum());
    const ScalarField back = poisson_solve_g0(laplacian_g0(u0, g), g);
    CHECK((back.values - u0.values).abs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(poisson_solve_g0(ScalarField::constant(g.size(), 1.0), g), SolvabilityError);

    const ScalarField shifted = shifted_poisson_solve(ScalarField(laplacian_g0(u, g).values - 2.0 * u.values), 2.0, g);
    CHECK((shifted.values - u.values).abs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(shifted_poisson_solve(u, 0.0, g), InvalidArgument);
}

TEST_CASE("vector-field derivatives of the height function") {
    const SphereGrid g = SphereGrid::build(32, 32, 4.0 * pi);
    const ScalarField x(g.cos_theta());
    // z d_z x = (1/2) sin(theta) d_theta x = -(1/2) sin^2(theta)
    const ComplexField d = vfield_derivative(x, g);
    const Eigen::ArrayXd expected = -0.5 * g.sin_theta().square();
    CHECK((d.values.real() - expected).abs().maxCoeff() < 1e-12);
    CHECK(d.values.imag().abs().maxCoeff() < 1e-12);
    // |grad x|^2 = (4 pi / V) sin^2(theta)
    const ScalarField gn = gradient_norm2(x, g);
    CHECK((gn.values - g.sin_theta().square()).abs().maxCoeff() < 1e-10);
}

TEST_CASE("reflection and band projection") {
    const SphereGrid g = SphereGrid::build(16, 32, 1.0);
    const ScalarField x(g.cos_theta());
    CHECK((reflect(x, g).values + x.values).abs().maxCoeff() < 1e-15);
    CHECK(chart_symmetry_defect(ScalarField(x.values.square()), g) < 1e-14);
    const ScalarField u = random_smooth_field(g, 3);
    CHECK((band_project(u, g).values - u.values).abs().maxCoeff() < 1e-12);
    const NodeMask band = pole_excluded_band(g);
    CHECK(band.count() > 0);
    CHECK(band.count() < static_cast<Eigen::Index>(g.size()));
}
