#include "vortex/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace vortex {

// Only the positive half is computed; the other half is mirrored.
void gauss_legendre(int n, Eigen::ArrayXd& x, Eigen::ArrayXd& w) {
    x.resize(n);
    w.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double r = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = r;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(r), p0 = P_{n-1}(r)
            dp = n * (r * p1 - p0) / (r * r - 1.0);
            const double dr = p1 / dp;
            r -= dr;
            if (std::abs(dr) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = r;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (r * p1 - p0) / (r * r - 1.0);
        }
        const double wi = 2.0 / ((1.0 - r * r) * dp * dp);
        x[i] = r;
        w[i] = wi;
        x[n - 1 - i] = -r;
        w[n - 1 - i] = wi;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

} // namespace vortex
