#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

namespace vortex {

using cdouble = std::complex<double>;

/// Real function sampled at every node of a SphereGrid (ring-major order).
struct ScalarField {
    Eigen::ArrayXd values;

    ScalarField() = default;
    explicit ScalarField(Eigen::ArrayXd v) : values(std::move(v)) {}

    static ScalarField constant(std::size_t n, double c) {
        return ScalarField(Eigen::ArrayXd::Constant(static_cast<Eigen::Index>(n), c));
    }

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    bool all_finite() const { return values.isFinite().all(); }
};

/// Complex function sampled at every node of a SphereGrid.
struct ComplexField {
    Eigen::ArrayXcd values;

    ComplexField() = default;
    explicit ComplexField(Eigen::ArrayXcd v) : values(std::move(v)) {}
    explicit ComplexField(const ScalarField& re) : values(re.values.cast<cdouble>()) {}

    static ComplexField constant(std::size_t n, cdouble c) {
        return ComplexField(Eigen::ArrayXcd::Constant(static_cast<Eigen::Index>(n), c));
    }

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    bool all_finite() const { return values.real().isFinite().all() && values.imag().isFinite().all(); }

    ScalarField real() const { return ScalarField(values.real()); }
    ScalarField imag() const { return ScalarField(values.imag()); }
};

} // namespace vortex
