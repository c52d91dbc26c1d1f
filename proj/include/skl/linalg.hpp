#pragma once

#include <cmath>
#include <optional>

#include "skl/errors.hpp"
#include "skl/matrix.hpp"

namespace skl {

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix,
// or nullopt when a pivot fails.
inline std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) return std::nullopt;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Solves L L^T X = B column by column.
inline Matrix cholesky_solve(const Matrix& l, const Matrix& b) {
  const std::size_t n = l.rows();
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, c);
      x(ii, c) = s / l(ii, ii);
    }
  }
  return x;
}

inline Matrix spd_residual(const Matrix& a, const Matrix& x, const Matrix& b) {
  Matrix r = b;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x(k, c);
      r(i, c) = b(i, c) - s;
    }
  return r;
}

// SPD solve with one step of iterative refinement and a residual gate of
// tol_rel * max(1, max|B|). When the factorization fails or the residual
// stays above the gate, retries once with a diagonal ridge of
// 1e-10 * tr(A)/n before raising NumericalError.
inline Matrix spd_solve_checked(const Matrix& a, const Matrix& b, double tol_rel = 1e-6) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) throw ArgumentError("spd_solve_checked: dimension mismatch");
  const double gate = tol_rel * std::max(1.0, max_abs(b));

  auto attempt = [&](const Matrix& m) -> std::optional<Matrix> {
    const auto l = cholesky(m);
    if (!l) return std::nullopt;
    Matrix x = cholesky_solve(*l, b);
    Matrix r = spd_residual(m, x, b);
    if (max_abs(r) > gate) {
      const Matrix dx = cholesky_solve(*l, r);
      for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += dx.data()[i];
      r = spd_residual(m, x, b);
    }
    if (max_abs(r) > gate) return std::nullopt;
    return x;
  };

  if (auto x = attempt(a)) return *x;

  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += a(i, i);
  Matrix ridged = a;
  const double ridge = 1e-10 * tr / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) ridged(i, i) += ridge;
  if (auto x = attempt(ridged)) return *x;

  throw NumericalError("spd_solve_checked: factorization failed or residual above tolerance");
}

}  // namespace skl
