#pragma once

#include "skl/matrix.hpp"

namespace skl {

// Closed-form dual solution of kernel regularized least squares:
// alpha = (K_ll + I/C)^{-1} y_l.
struct RlsSolution {
  Vector alpha;
  double c = 0.0;
};

RlsSolution rls_solve(const Matrix& k_ll, const Vector& y_l, double c);

// Dual objective alpha^T y - 1/2 alpha^T (K + I/C) alpha.
double rls_dual_objective(const RlsSolution& sol, const Matrix& k_ll, const Vector& y_l);

// 1/2 y^T (K + I/C)^{-1} y, evaluated by a factorized solve.
double rls_optimal_value(const Matrix& k_ll, const Vector& y_l, double c);

// Decision values K_ul * alpha.
Vector rls_predict(const Matrix& k_ul, const RlsSolution& sol);

// Gaussian kernel exp(-||x_i - x_j||^2 / (2 sigma^2)) on all points, with the
// fixed bandwidth sigma = (1/n) sum_i ||x_i|| used by the supervised baseline.
Matrix gaussian_kernel(const Matrix& features);
double gaussian_kernel_sigma(const Matrix& features);

}  // namespace skl
