#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vortex/fields.hpp"
#include "vortex/grid.hpp"

namespace vortex {

/// One evaluation of the Futaki functional on a seeded (eta, f) pair.
struct FutakiSample {
    std::string descriptor; // "zero" or "seed=<n>"
    cdouble value;
};

struct FutakiReport {
    cdouble value;       // mean over samples
    cdouble closed_form; // i a (V - 4 pi N / tau^2) (N - 2 ell)
    std::vector<FutakiSample> samples;
    double max_spread = 0.0;   // max pairwise |F_i - F_j|
    double max_real_part = 0.0; // max |Re F_i|
    double tolerance = 0.0;
    double obstruction_threshold = 0.0;
    bool obstructed = false;
    bool pass = false;
};

struct FutakiOptions {
    /// Relative invariance tolerance; the absolute tolerance is
    /// relative * max(1, |closed form|).
    double invariance_tol = 1e-6;
    /// Tolerance on |int e^eta omega_0 - V| / V.
    double volume_tol = 1e-10;
    int field_degree = 3;
};

/// F_0 = -int phi_eta (2 K - Laplacian eta) omega_0 with K = 4 pi / V.
/// Requires int e^eta omega_0 = V; throws VolumeConstraintError otherwise.
cdouble classical_futaki(const ScalarField& eta, const SphereGrid& grid, double volume_tol = 1e-10);

/// The two-integral Einstein-Maxwell-Higgs Futaki functional of (eta, f).
/// Requires int e^eta omega_0 = V.
cdouble emh_futaki(const ScalarField& eta, const ScalarField& f, const VortexConfig& config,
                   const SphereGrid& grid, double volume_tol = 1e-10);

/// i a (V - 4 pi N / tau^2) (N - 2 ell).
cdouble emh_futaki_closed(const VortexConfig& config);

/// |closed form| above this value declares an obstruction:
/// 1e-9 * a * V * max(1, tau^-2).
double obstruction_threshold(const VortexConfig& config);

/// Evaluates the functional on (0, 0) and n_samples seeded random pairs
/// (eta volume-normalized). PASS iff the spread and the deviation of the
/// mean from the closed form are within tolerance and every value is
/// imaginary to tolerance.
FutakiReport invariance_report(const VortexConfig& config, const SphereGrid& grid, int n_samples,
                               std::uint64_t seed, const FutakiOptions& opts = {});
/// Same, with one random pair per listed seed (at least two).
FutakiReport invariance_report(const VortexConfig& config, const SphereGrid& grid,
                               const std::vector<std::uint64_t>& seeds, const FutakiOptions& opts = {});

/// max over the pole-excluded band of |Laplacian log Phi + 4 pi N / V|.
/// log Phi is never sampled; see log_laplacian().
double poincare_lelong_check(const VortexConfig& config, const SphereGrid& grid,
                             const NodeMask& band);
double poincare_lelong_check(const VortexConfig& config, const SphereGrid& grid);

/// Same check for raw (N, ell), allowing the degenerate N = 0.
double poincare_lelong_residual(int N, int ell, const SphereGrid& grid, const NodeMask& band);

} // namespace vortex
