#pragma once

#include <Eigen/Dense>

namespace vortex {

/// Gauss-Legendre abscissae (descending, exactly antisymmetric) and weights
/// on [-1, 1].
void gauss_legendre(int n, Eigen::ArrayXd& x, Eigen::ArrayXd& w);

} // namespace vortex
