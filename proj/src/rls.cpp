#include "skl/rls.hpp"

#include <cmath>

#include "skl/errors.hpp"
#include "skl/linalg.hpp"

namespace skl {

namespace {

Matrix as_column(const Vector& v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

void require_psd(const Matrix& k) {
  const std::size_t n = k.rows();
  if (k.cols() != n) throw ArgumentError("rls: kernel must be square");
  const double scale = 1.0 + max_abs(k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(k(i, j) - k(j, i)) > 1e-8 * scale)
        throw ArgumentError("rls: kernel not symmetric");
  // PSD within 1e-8: a Cholesky of K + tol*I must go through
  Matrix shifted = k;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += 1e-8 * scale;
  if (!cholesky(shifted)) throw ArgumentError("rls: kernel not positive semidefinite");
}

}  // namespace

RlsSolution rls_solve(const Matrix& k_ll, const Vector& y_l, double c) {
  if (c <= 0.0) throw ArgumentError("rls_solve: C must be positive");
  if (y_l.size() != k_ll.rows()) throw ArgumentError("rls_solve: label length mismatch");
  require_psd(k_ll);

  Matrix m = k_ll;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0 / c;
  const Matrix rhs = as_column(y_l);
  const Matrix x = spd_solve_checked(m, rhs);

  RlsSolution sol;
  sol.c = c;
  sol.alpha.resize(y_l.size());
  for (std::size_t i = 0; i < y_l.size(); ++i) sol.alpha[i] = x(i, 0);

  double y_max = 0.0;
  for (double v : y_l) y_max = std::max(y_max, std::abs(v));
  const Matrix res = spd_residual(m, x, rhs);
  if (max_abs(res) > 1e-8 * (1.0 + y_max))
    throw NumericalError("rls_solve: stationarity residual above tolerance");
  return sol;
}

double rls_dual_objective(const RlsSolution& sol, const Matrix& k_ll, const Vector& y_l) {
  const std::size_t n = y_l.size();
  if (sol.alpha.size() != n || k_ll.rows() != n) throw ArgumentError("rls_dual_objective: dimension mismatch");
  double lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) lin += sol.alpha[i] * y_l[i];
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += k_ll(i, j) * sol.alpha[j];
    row += sol.alpha[i] / sol.c;
    quad += sol.alpha[i] * row;
  }
  return lin - 0.5 * quad;
}

double rls_optimal_value(const Matrix& k_ll, const Vector& y_l, double c) {
  if (c <= 0.0) throw ArgumentError("rls_optimal_value: C must be positive");
  Matrix m = k_ll;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0 / c;
  const Matrix rhs = as_column(y_l);
  const Matrix x = spd_solve_checked(m, rhs);
  double v = 0.0;
  for (std::size_t i = 0; i < y_l.size(); ++i) v += y_l[i] * x(i, 0);
  return 0.5 * v;
}

Vector rls_predict(const Matrix& k_ul, const RlsSolution& sol) {
  if (k_ul.cols() != sol.alpha.size()) throw ArgumentError("rls_predict: dimension mismatch");
  Vector f(k_ul.rows(), 0.0);
  for (std::size_t i = 0; i < k_ul.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k_ul.cols(); ++j) s += k_ul(i, j) * sol.alpha[j];
    f[i] = s;
  }
  return f;
}

double gaussian_kernel_sigma(const Matrix& features) {
  const std::size_t n = features.rows();
  double sigma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < features.cols(); ++k) sq += features(i, k) * features(i, k);
    sigma += std::sqrt(sq);
  }
  return sigma / static_cast<double>(n);
}

Matrix gaussian_kernel(const Matrix& features) {
  double sigma = gaussian_kernel_sigma(features);
  if (sigma == 0.0) sigma = 1.0;  // every point at the origin
  const double denom = 2.0 * sigma * sigma;
  const std::size_t n = features.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t t = 0; t < features.cols(); ++t) {
        const double d = features(i, t) - features(j, t);
        sq += d * d;
      }
      const double v = std::exp(-sq / denom);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace skl
