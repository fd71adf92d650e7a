#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "vortex/field.hpp"
#include "vortex/grid.hpp"

namespace vortex {

/**
 * Problem instance: vortex number N, multiplicity ell at z = 0 (the pole at
 * infinity carries N - ell), symmetry-breaking scale tau and total volume V.
 *
 * The coupling is always a = 2 / N. A caller may pass a value for a to make
 * that explicit; anything else is rejected.
 */
struct VortexConfig {
    int N = 1;
    int ell = 0;
    double tau = 1.0;
    double volume = 4.0 * pi;
    double a = 2.0;
    double epsilon = 1.0;

    static VortexConfig make(int N, int ell, double tau, double volume,
                             std::optional<double> a = std::nullopt, double epsilon = 1.0);

    /// V - 4 pi N / tau^2. Sign is not enforced here.
    double bradlow_margin() const;
    /// N == 2 ell: the configuration invariant under z -> 1/conj(z).
    bool balanced() const { return N == 2 * ell; }
};

/// Throws InvalidArgument if the grid volume differs from config.volume.
void require_matching_volume(const VortexConfig& config, const SphereGrid& grid);

/// Phi = |z|^{2 ell} / (1 + |z|^2)^N, the pointwise norm of z^ell in the
/// Fubini-Study metric on O(N).
ScalarField higgs_density(const VortexConfig& config, const SphereGrid& grid);

/// Same density for raw (N, ell); N = 0 gives the constant 1.
ScalarField higgs_density(int N, int ell, const SphereGrid& grid);

/// psi_0 = ell - N |z|^2 / (1 + |z|^2).
ScalarField psi0(const VortexConfig& config, const SphereGrid& grid);

/// psi_f = psi_0 + z d_z f.
ComplexField psi_f(const ScalarField& f, const VortexConfig& config, const SphereGrid& grid);

/// The dbar-potential of e^eta contracted with omega_0 along z d_z,
/// normalized by int phi_eta e^eta omega_0 = 0.
///
/// Applying d_z to the defining equation gives
///   Laplacian(phi_eta) = 2i (cos(theta) e^eta + z d_z e^eta),
/// which is solved spectrally and then shifted by the normalizing constant.
ComplexField phi_eta(const ScalarField& eta, const SphereGrid& grid);

/// Result of rescaling an epsilon-solution to epsilon = 1.
struct NormalizedPair {
    ScalarField f;
    /// Conformal factor relative to the round metric of volume `volume`.
    ScalarField eta;
    double volume;
};

/// Rescales g = (1/eps^2) e^eta g_0' and re-bases the round metric so that
/// its volume matches: returns (f, eta', V_new) with int e^{eta'} omega_0 = V_new
/// on the re-based background. f (the smooth part of u) is unchanged.
NormalizedPair normalize_epsilon(const ScalarField& f, const ScalarField& eta, double epsilon,
                                 const SphereGrid& grid);

/// Shifts eta by the constant log(V / int e^eta omega_0).
ScalarField normalize_volume(const ScalarField& eta, const SphereGrid& grid);

// ---------------------------------------------------------------------------
// Identity residuals. Identities between (0,1)-forms are compared through
// their coefficient against d conj(z) in the chart, on nodes selected by
// `mask` (which must avoid the poles). Each returns the max modulus.

using NodeMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Nodes with theta in [0.1 pi, 0.9 pi].
NodeMask interior_band(const SphereGrid& grid);

/// dbar psi_0 - i N iota_v omega_FS.
double psi0_dbar_residual(const VortexConfig& config, const SphereGrid& grid, const NodeMask& mask);

/// -i dbar psi_f - iota_v (i dbar d log h), h = e^f h_FS^N.
double psi_dbar_residual(const ScalarField& f, const VortexConfig& config, const SphereGrid& grid,
                         const NodeMask& mask);

/// iota_v (d phi + (d log h) phi) - psi_f phi for the section phi = z^ell.
double psi_section_residual(const ScalarField& f, const VortexConfig& config,
                            const SphereGrid& grid, const NodeMask& mask);

/// dbar(psi_f (e^f Phi - tau^2)) + iota_v (dbar d (e^f Phi) - tau^2 dbar d log h).
double mixed_dbar_residual(const ScalarField& f, const VortexConfig& config, const SphereGrid& grid,
                           const NodeMask& mask);

/// dbar phi - e^eta iota_v omega_0 for a candidate potential phi.
double phi_eta_dbar_residual(const ComplexField& phi, const ScalarField& eta,
                             const SphereGrid& grid, const NodeMask& mask);

// ---------------------------------------------------------------------------

/// Seeded smooth test field: random combination of spherical harmonics of
/// degree 1..max_degree, rescaled to a sup-norm drawn from [0.25, amplitude].
ScalarField random_smooth_field(const SphereGrid& grid, std::uint64_t seed, int max_degree = 3,
                                double amplitude = 1.0);

/// Same as above restricted to zonal (m = 0) harmonics.
ScalarField random_axisymmetric_field(const SphereGrid& grid, std::uint64_t seed,
                                      int max_degree = 3, double amplitude = 1.0);

} // namespace vortex
