#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>

#include <Eigen/Dense>

#include "vortex/field.hpp"

namespace vortex {

inline constexpr double pi = std::numbers::pi;

/// Area forms accepted by integrate(). omega_0 is the area form of the round
/// metric of volume V; the Fubini-Study form has total mass 2 pi and
/// omega_0 = (V / 2 pi) omega_FS.
enum class AreaForm { Omega0, FubiniStudy };

/// Spherical-harmonic coefficients a(l, m), 0 <= m <= min(l, M), stored in a
/// (L+1) x (M+1) matrix. Negative orders are implied by a(l,-m) = conj(a(l,m)).
struct Spectrum {
    Eigen::MatrixXcd coeffs;
};

namespace detail {
struct SphericalTransform;
}

/**
 * Gauss-Legendre (in cos theta) x uniform longitude grid on the round sphere
 * of volume V.
 *
 * Colatitude theta is measured from the pole z = 0, so that the stereographic
 * chart coordinate is z = tan(theta/2) e^{i phi}; theta = pi is the pole at
 * infinity. Nodes are stored ring-major: k = i * n_phi + j.
 *
 * The spectral band is degree l <= L = n_theta - 1 and order
 * |m| <= M = min(L, (n_phi - 1) / 2). Quadrature is exact for products of two
 * band-limited fields, so the band projection is orthogonal with respect to
 * the quadrature inner product.
 *
 * Immutable after construction; copies share the transform tables.
 */
class SphereGrid {
public:
    static SphereGrid build(int n_theta, int n_phi, double volume);

    int n_theta() const { return n_theta_; }
    int n_phi() const { return n_phi_; }
    std::size_t size() const { return static_cast<std::size_t>(n_theta_) * n_phi_; }
    double volume() const { return volume_; }
    int max_degree() const { return n_theta_ - 1; }
    int max_order() const;

    /// Same nodes and transforms, different total volume.
    SphereGrid with_volume(double volume) const;

    // Per-node data.
    const Eigen::ArrayXd& theta() const { return theta_; }
    const Eigen::ArrayXd& phi() const { return phi_; }
    const Eigen::ArrayXd& cos_theta() const { return cos_theta_; }
    const Eigen::ArrayXd& sin_theta() const { return sin_theta_; }
    const Eigen::ArrayXcd& z() const { return z_; }
    const Eigen::ArrayXd& abs_z2() const { return abs_z2_; }
    /// Unit-normalized quadrature weights; integral of F against omega_0 is
    /// V * sum(weights * F).
    const Eigen::ArrayXd& weights() const { return weights_; }
    /// rho(z) = (V/pi) / (1 + |z|^2)^2, so that g_0 = rho (dx^2 + dy^2).
    const Eigen::ArrayXd& conformal_factor() const { return rho_; }

    /// Index of the node image under z -> 1 / conj(z).
    std::size_t mirror(std::size_t k) const;

    /// Ring (colatitude) data: Gauss-Legendre abscissae in cos theta, descending.
    const Eigen::ArrayXd& ring_cos_theta() const;
    const Eigen::ArrayXd& ring_weights() const;

    Spectrum analyze(const Eigen::ArrayXd& values) const;
    Eigen::ArrayXd synthesize(const Spectrum& s) const;
    /// Pointwise sin(theta) * d/dtheta of the band-limited synthesis.
    Eigen::ArrayXd synthesize_sin_dtheta(const Spectrum& s) const;
    Spectrum zero_spectrum() const;

private:
    SphereGrid() = default;

    int n_theta_ = 0;
    int n_phi_ = 0;
    double volume_ = 0.0;
    Eigen::ArrayXd theta_, phi_, cos_theta_, sin_theta_, abs_z2_, weights_, rho_;
    Eigen::ArrayXcd z_;
    std::shared_ptr<const detail::SphericalTransform> transform_;
};

// ---------------------------------------------------------------------------
// Quadrature

cdouble integrate(const ComplexField& field, AreaForm form, const SphereGrid& grid);
double integrate(const ScalarField& field, AreaForm form, const SphereGrid& grid);

// ---------------------------------------------------------------------------
// Differential operators. All are applied to the band-limited interpolant of
// the sampled field.

/// Laplace-Beltrami operator of g_0 (negative semi-definite).
ScalarField laplacian_g0(const ScalarField& field, const SphereGrid& grid);
ComplexField laplacian_g0(const ComplexField& field, const SphereGrid& grid);

/// z d/dz of the field, i.e. the derivative along v^{1,0} = z d_z.
/// Equals (sin(theta) d_theta - i d_phi) / 2; vanishes at both poles.
ComplexField vfield_derivative(const ScalarField& field, const SphereGrid& grid);
ComplexField vfield_derivative(const ComplexField& field, const SphereGrid& grid);

/// conj(z) d/dconj(z) of the field: (sin(theta) d_theta + i d_phi) / 2.
ComplexField conj_vfield_derivative(const ComplexField& field, const SphereGrid& grid);

/// |grad F|^2 with respect to g_0.
ScalarField gradient_norm2(const ScalarField& field, const SphereGrid& grid);

/// Solves Laplacian(w) = rhs with zero omega_0-mean. Throws SolvabilityError
/// when the mean of rhs exceeds `mean_tol` (relative to max(1, sup|rhs|)).
ComplexField poisson_solve_g0(const ComplexField& rhs, const SphereGrid& grid,
                              double mean_tol = 1e-8);
ScalarField poisson_solve_g0(const ScalarField& rhs, const SphereGrid& grid,
                             double mean_tol = 1e-8);

/// (Laplacian - shift)^{-1} for shift > 0; well-posed on all modes.
ScalarField shifted_poisson_solve(const ScalarField& rhs, double shift, const SphereGrid& grid);

/// Orthogonal projection onto the spectral band.
ScalarField band_project(const ScalarField& field, const SphereGrid& grid);

/// Field evaluated at mirrored nodes: (R F)(z) = F(1 / conj(z)).
ScalarField reflect(const ScalarField& field, const SphereGrid& grid);

/// max over nodes of |F(z) - F(1/conj z)|.
double chart_symmetry_defect(const ScalarField& field, const SphereGrid& grid);

/// Nodes whose colatitude lies in [theta_min, theta_max].
Eigen::Array<bool, Eigen::Dynamic, 1> colatitude_band(const SphereGrid& grid, double theta_min,
                                                      double theta_max);

/// Default pole-exclusion band: drops nodes with theta < 2 dtheta or
/// theta > pi - 2 dtheta, dtheta = pi / n_theta.
Eigen::Array<bool, Eigen::Dynamic, 1> pole_excluded_band(const SphereGrid& grid);

/// Laplacian of log F at nodes where F > 0, evaluated through the quotient
/// rule on the smooth field F (log F itself is never sampled). Entries outside
/// `mask` are set to zero.
ScalarField log_laplacian(const ScalarField& field, const SphereGrid& grid,
                          const Eigen::Array<bool, Eigen::Dynamic, 1>& mask);

} // namespace vortex
