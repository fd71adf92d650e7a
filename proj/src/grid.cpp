#include "vortex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "vortex/errors.hpp"
#include "vortex/quadrature.hpp"

namespace vortex {

namespace detail {

struct SphericalTransform {
    int L = 0;
    int M = 0;
    int n_theta = 0;
    int n_phi = 0;
    Eigen::ArrayXd x;
    Eigen::ArrayXd w;
    // Per order m: rows l = m..L, columns rings.
    std::vector<Eigen::MatrixXd> legendre;
    std::vector<Eigen::MatrixXd> sin_dtheta;
    // analysis_dft(j, m) = exp(-i m phi_j) / n_phi
    Eigen::MatrixXcd analysis_dft;
    // synthesis_dft(j, m) = c_m exp(i m phi_j), c_0 = 1, c_m = 2
    Eigen::MatrixXcd synthesis_dft;

    SphericalTransform(int n_theta_, int n_phi_) : n_theta(n_theta_), n_phi(n_phi_) {
        L = n_theta - 1;
        M = std::min(L, (n_phi - 1) / 2);
        gauss_legendre(n_theta, x, w);

        legendre.resize(M + 1);
        sin_dtheta.resize(M + 1);
        for (int m = 0; m <= M; ++m) {
            legendre[m].setZero(L + 1 - m, n_theta);
            sin_dtheta[m].setZero(L + 1 - m, n_theta);
        }
        // Orthonormal associated Legendre functions on [-1, 1].
        std::vector<double> p(L + 2);
        for (int i = 0; i < n_theta; ++i) {
            const double xi = x[i];
            const double si = std::sqrt((1.0 - xi) * (1.0 + xi));
            double pmm = 1.0 / std::sqrt(2.0);
            for (int m = 0; m <= M; ++m) {
                if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * si;
                std::fill(p.begin(), p.end(), 0.0);
                p[m] = pmm;
                if (m + 1 <= L) p[m + 1] = std::sqrt(2.0 * m + 3.0) * xi * pmm;
                for (int l = m + 2; l <= L; ++l) {
                    const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
                    const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                               (4.0 * (l - 1) * (l - 1) - 1.0));
                    p[l] = a * (xi * p[l - 1] - b * p[l - 2]);
                }
                for (int l = m; l <= L; ++l) {
                    legendre[m](l - m, i) = p[l];
                    // sin(theta) d/dtheta P_lm = l x P_lm - sqrt((2l+1)/(2l-1) (l^2 - m^2)) P_{l-1,m}
                    double d = l * xi * p[l];
                    if (l > m) {
                        d -= std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) *
                                       (double(l) * l - double(m) * m)) *
                             p[l - 1];
                    }
                    sin_dtheta[m](l - m, i) = d;
                }
            }
        }

        analysis_dft.resize(n_phi, M + 1);
        synthesis_dft.resize(n_phi, M + 1);
        for (int j = 0; j < n_phi; ++j) {
            for (int m = 0; m <= M; ++m) {
                // Reduce the angle exactly in integer arithmetic first.
                const double ang = 2.0 * pi * double((static_cast<long>(m) * j) % n_phi) / n_phi;
                const cdouble e(std::cos(ang), std::sin(ang));
                analysis_dft(j, m) = std::conj(e) / double(n_phi);
                synthesis_dft(j, m) = (m == 0 ? 1.0 : 2.0) * e;
            }
        }
    }

    Spectrum analyze(const Eigen::ArrayXd& values) const {
        Eigen::Map<const Eigen::MatrixXd> f(values.data(), n_phi, n_theta);
        // fourier(m, i) for ring i
        const Eigen::MatrixXcd fourier = analysis_dft.transpose() * f.cast<cdouble>();
        Spectrum s;
        s.coeffs.setZero(L + 1, M + 1);
        for (int m = 0; m <= M; ++m) {
            const Eigen::VectorXcd weighted =
                (fourier.row(m).transpose().array() * w.cast<cdouble>()).matrix();
            s.coeffs.col(m).tail(L + 1 - m) = legendre[m].cast<cdouble>() * weighted;
        }
        return s;
    }

    Eigen::ArrayXd synthesize_with(const Spectrum& s, const std::vector<Eigen::MatrixXd>& table) const {
        Eigen::MatrixXcd g(M + 1, n_theta);
        for (int m = 0; m <= M; ++m) {
            g.row(m) = (table[m].transpose().cast<cdouble>() * s.coeffs.col(m).tail(L + 1 - m)).transpose();
        }
        const Eigen::MatrixXd f = (synthesis_dft * g).real();
        return Eigen::Map<const Eigen::ArrayXd>(f.data(), f.size());
    }
};

} // namespace detail

SphereGrid SphereGrid::build(int n_theta, int n_phi, double volume) {
    if (n_theta < 8 || n_phi < 8) {
        throw InvalidArgument("build_grid: n_theta and n_phi must be >= 8 (got " +
                              std::to_string(n_theta) + " x " + std::to_string(n_phi) + ")");
    }
    if (!(volume > 0.0) || !std::isfinite(volume)) {
        throw InvalidArgument("build_grid: volume must be positive and finite");
    }
    SphereGrid g;
    g.n_theta_ = n_theta;
    g.n_phi_ = n_phi;
    g.transform_ = std::make_shared<const detail::SphericalTransform>(n_theta, n_phi);

    const auto& tr = *g.transform_;
    const auto n = static_cast<Eigen::Index>(g.size());
    g.theta_.resize(n);
    g.phi_.resize(n);
    g.cos_theta_.resize(n);
    g.sin_theta_.resize(n);
    g.abs_z2_.resize(n);
    g.weights_.resize(n);
    g.z_.resize(n);
    for (int i = 0; i < n_theta; ++i) {
        const double x = tr.x[i];
        const double s = std::sqrt((1.0 - x) * (1.0 + x));
        const double th = std::acos(x);
        // |z|^2 = tan^2(theta/2) = (1 - x) / (1 + x)
        const double r = s / (1.0 + x);
        for (int j = 0; j < n_phi; ++j) {
            const Eigen::Index k = Eigen::Index(i) * n_phi + j;
            const double ph = 2.0 * pi * j / n_phi;
            g.theta_[k] = th;
            g.phi_[k] = ph;
            g.cos_theta_[k] = x;
            g.sin_theta_[k] = s;
            g.abs_z2_[k] = (1.0 - x) / (1.0 + x);
            g.weights_[k] = tr.w[i] / (2.0 * n_phi);
            g.z_[k] = std::polar(r, ph);
        }
    }
    g.volume_ = volume;
    g.rho_ = (volume / pi) * (1.0 + g.cos_theta_).square() / 4.0;
    return g;
}

SphereGrid SphereGrid::with_volume(double volume) const {
    if (!(volume > 0.0) || !std::isfinite(volume)) {
        throw InvalidArgument("with_volume: volume must be positive and finite");
    }
    SphereGrid g = *this;
    g.volume_ = volume;
    g.rho_ = (volume / pi) * (1.0 + cos_theta_).square() / 4.0;
    return g;
}

int SphereGrid::max_order() const { return transform_->M; }

std::size_t SphereGrid::mirror(std::size_t k) const {
    const std::size_t i = k / n_phi_;
    const std::size_t j = k % n_phi_;
    return (n_theta_ - 1 - i) * n_phi_ + j;
}

const Eigen::ArrayXd& SphereGrid::ring_cos_theta() const { return transform_->x; }
const Eigen::ArrayXd& SphereGrid::ring_weights() const { return transform_->w; }

Spectrum SphereGrid::analyze(const Eigen::ArrayXd& values) const {
    if (static_cast<std::size_t>(values.size()) != size()) {
        throw InvalidArgument("analyze: field size does not match grid");
    }
    return transform_->analyze(values);
}

Eigen::ArrayXd SphereGrid::synthesize(const Spectrum& s) const {
    return transform_->synthesize_with(s, transform_->legendre);
}

Eigen::ArrayXd SphereGrid::synthesize_sin_dtheta(const Spectrum& s) const {
    return transform_->synthesize_with(s, transform_->sin_dtheta);
}

Spectrum SphereGrid::zero_spectrum() const {
    Spectrum s;
    s.coeffs.setZero(transform_->L + 1, transform_->M + 1);
    return s;
}

// ---------------------------------------------------------------------------

namespace {

void check_size(std::size_t n, const SphereGrid& grid, const char* op) {
    if (n != grid.size()) {
        throw InvalidArgument(std::string(op) + ": field size does not match grid");
    }
}

Spectrum times_dphi(Spectrum s) {
    for (Eigen::Index m = 0; m < s.coeffs.cols(); ++m) s.coeffs.col(m) *= cdouble(0.0, double(m));
    return s;
}

Eigen::ArrayXd real_laplacian(const Eigen::ArrayXd& v, const SphereGrid& grid) {
    Spectrum s = grid.analyze(v);
    const double k = 4.0 * pi / grid.volume();
    for (Eigen::Index l = 0; l < s.coeffs.rows(); ++l) s.coeffs.row(l) *= -double(l * (l + 1)) * k;
    return grid.synthesize(s);
}

// Returns (sin(theta) d_theta v, d_phi v).
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> real_derivatives(const Eigen::ArrayXd& v,
                                                           const SphereGrid& grid) {
    const Spectrum s = grid.analyze(v);
    return {grid.synthesize_sin_dtheta(s), grid.synthesize(times_dphi(s))};
}

Eigen::ArrayXd real_poisson(const Eigen::ArrayXd& rhs, const SphereGrid& grid, double shift) {
    Spectrum s = grid.analyze(rhs);
    const double k = 4.0 * pi / grid.volume();
    for (Eigen::Index l = 0; l < s.coeffs.rows(); ++l) {
        const double eig = -double(l * (l + 1)) * k - shift;
        if (eig == 0.0) {
            s.coeffs.row(l).setZero();
        } else {
            s.coeffs.row(l) /= eig;
        }
    }
    return grid.synthesize(s);
}

} // namespace

cdouble integrate(const ComplexField& field, AreaForm form, const SphereGrid& grid) {
    check_size(field.size(), grid, "integrate");
    const double mass = form == AreaForm::Omega0 ? grid.volume() : 2.0 * pi;
    return mass * (field.values * grid.weights().cast<cdouble>()).sum();
}

double integrate(const ScalarField& field, AreaForm form, const SphereGrid& grid) {
    check_size(field.size(), grid, "integrate");
    const double mass = form == AreaForm::Omega0 ? grid.volume() : 2.0 * pi;
    return mass * (field.values * grid.weights()).sum();
}

ScalarField laplacian_g0(const ScalarField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "laplacian_g0");
    return ScalarField(real_laplacian(field.values, grid));
}

ComplexField laplacian_g0(const ComplexField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "laplacian_g0");
    Eigen::ArrayXcd out(field.values.size());
    out.real() = real_laplacian(field.values.real(), grid);
    out.imag() = real_laplacian(field.values.imag(), grid);
    return ComplexField(std::move(out));
}

ComplexField vfield_derivative(const ScalarField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "vfield_derivative");
    auto [st, dp] = real_derivatives(field.values, grid);
    Eigen::ArrayXcd out(field.values.size());
    out.real() = 0.5 * st;
    out.imag() = -0.5 * dp;
    return ComplexField(std::move(out));
}

ComplexField vfield_derivative(const ComplexField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "vfield_derivative");
    auto [su, pu] = real_derivatives(field.values.real(), grid);
    auto [sv, pv] = real_derivatives(field.values.imag(), grid);
    // (S - i P)(u + i v) / 2
    Eigen::ArrayXcd out(field.values.size());
    out.real() = 0.5 * (su + pv);
    out.imag() = 0.5 * (sv - pu);
    return ComplexField(std::move(out));
}

ComplexField conj_vfield_derivative(const ComplexField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "conj_vfield_derivative");
    auto [su, pu] = real_derivatives(field.values.real(), grid);
    auto [sv, pv] = real_derivatives(field.values.imag(), grid);
    // (S + i P)(u + i v) / 2
    Eigen::ArrayXcd out(field.values.size());
    out.real() = 0.5 * (su - pv);
    out.imag() = 0.5 * (sv + pu);
    return ComplexField(std::move(out));
}

ScalarField gradient_norm2(const ScalarField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "gradient_norm2");
    auto [st, dp] = real_derivatives(field.values, grid);
    const Eigen::ArrayXd s2 = grid.sin_theta().square();
    return ScalarField((4.0 * pi / grid.volume()) * (st.square() + dp.square()) / s2);
}

namespace {
double mean_tolerance(double scale, double mean_tol) {
    return std::max(mean_tol, 1e3 * std::numeric_limits<double>::epsilon()) * std::max(1.0, scale);
}
} // namespace

ComplexField poisson_solve_g0(const ComplexField& rhs, const SphereGrid& grid, double mean_tol) {
    check_size(rhs.size(), grid, "poisson_solve_g0");
    const cdouble mean = integrate(rhs, AreaForm::Omega0, grid) / grid.volume();
    const double scale = rhs.values.abs().maxCoeff();
    if (std::abs(mean) > mean_tolerance(scale, mean_tol)) {
        throw SolvabilityError("poisson_solve_g0: right-hand side has non-zero mean " +
                                   std::to_string(std::abs(mean)),
                               std::abs(mean));
    }
    Eigen::ArrayXcd out(rhs.values.size());
    out.real() = real_poisson(rhs.values.real(), grid, 0.0);
    out.imag() = real_poisson(rhs.values.imag(), grid, 0.0);
    return ComplexField(std::move(out));
}

ScalarField poisson_solve_g0(const ScalarField& rhs, const SphereGrid& grid, double mean_tol) {
    check_size(rhs.size(), grid, "poisson_solve_g0");
    const double mean = integrate(rhs, AreaForm::Omega0, grid) / grid.volume();
    const double scale = rhs.values.abs().maxCoeff();
    if (std::abs(mean) > mean_tolerance(scale, mean_tol)) {
        throw SolvabilityError("poisson_solve_g0: right-hand side has non-zero mean " +
                                   std::to_string(mean),
                               mean);
    }
    return ScalarField(real_poisson(rhs.values, grid, 0.0));
}

ScalarField shifted_poisson_solve(const ScalarField& rhs, double shift, const SphereGrid& grid) {
    check_size(rhs.size(), grid, "shifted_poisson_solve");
    if (!(shift > 0.0)) throw InvalidArgument("shifted_poisson_solve: shift must be positive");
    return ScalarField(real_poisson(rhs.values, grid, shift));
}

ScalarField band_project(const ScalarField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "band_project");
    return ScalarField(grid.synthesize(grid.analyze(field.values)));
}

ScalarField reflect(const ScalarField& field, const SphereGrid& grid) {
    check_size(field.size(), grid, "reflect");
    Eigen::ArrayXd out(field.values.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = field.values[grid.mirror(k)];
    return ScalarField(std::move(out));
}

double chart_symmetry_defect(const ScalarField& field, const SphereGrid& grid) {
    return (field.values - reflect(field, grid).values).abs().maxCoeff();
}

Eigen::Array<bool, Eigen::Dynamic, 1> colatitude_band(const SphereGrid& grid, double theta_min,
                                                      double theta_max) {
    return (grid.theta() >= theta_min) && (grid.theta() <= theta_max);
}

Eigen::Array<bool, Eigen::Dynamic, 1> pole_excluded_band(const SphereGrid& grid) {
    const double dtheta = pi / grid.n_theta();
    return (grid.theta() >= 2.0 * dtheta) && (grid.theta() <= pi - 2.0 * dtheta);
}

ScalarField log_laplacian(const ScalarField& field, const SphereGrid& grid,
                          const Eigen::Array<bool, Eigen::Dynamic, 1>& mask) {
    check_size(field.size(), grid, "log_laplacian");
    const ScalarField lap = laplacian_g0(field, grid);
    const ScalarField grad2 = gradient_norm2(field, grid);
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(field.values.size());
    for (Eigen::Index k = 0; k < out.size(); ++k) {
        if (!mask[k]) continue;
        const double F = field.values[k];
        if (!(F > 0.0)) {
            throw InvalidArgument("log_laplacian: field must be positive on the evaluation band");
        }
        out[k] = lap.values[k] / F - grad2.values[k] / (F * F);
    }
    return ScalarField(std::move(out));
}

} // namespace vortex
