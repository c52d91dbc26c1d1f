#include "skl/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace skl::kernels {

namespace {

double sq_dist_rows(const Matrix& x, std::size_t i, std::size_t j) {
  const double* a = x.row(i);
  const double* b = x.row(j);
  double s = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

Matrix pairwise_sq_dists_serial(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = sq_dist_rows(x, i, j);
      d(i, j) = s;
      d(j, i) = s;
    }
  return d;
}

Matrix pairwise_sq_dists_omp(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = sq_dist_rows(x, i, j);
      d(i, j) = s;
      d(j, i) = s;
    }
  return d;
}

double weighted_gram_entry(const Matrix& u, const Vector& w, int r, int c) {
  const double* a = u.row(static_cast<std::size_t>(r));
  const double* b = u.row(static_cast<std::size_t>(c));
  double s = 0.0;
  for (std::size_t k = 0; k < u.cols(); ++k) s += a[k] * w[k] * b[k];
  return s;
}

Matrix weighted_gram_serial(const Matrix& u, const Vector& w, const std::vector<int>& rows,
                            const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(r, c) = weighted_gram_entry(u, w, rows[r], cols[c]);
  return out;
}

Matrix weighted_gram_omp(const Matrix& u, const Vector& w, const std::vector<int>& rows,
                         const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows.size()); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(r, c) = weighted_gram_entry(u, w, rows[r], cols[c]);
  return out;
}

// Householder reduction after Numerical Recipes tred2, 0-indexed. The serial
// variant keeps the classic single-pass loop structure; the parallel variant
// splits each stage into independent per-row passes so rows can be farmed out
// without changing any per-element summation order.
void householder_tridiag_serial(Matrix& a, Vector& d, Vector& e) {
  const int n = static_cast<int>(a.rows());
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
        for (int k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

void householder_tridiag_omp(Matrix& a, Vector& d, Vector& e) {
  const int n = static_cast<int>(a.rows());
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        const double g0 = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g0;
        h -= f * g0;
        a(i, l) = f - g0;
        // Stage 1: e[j] dot products, independent per row j.
#pragma omp parallel for schedule(static)
        for (int j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          double g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
        }
        f = 0.0;
        for (int j = 0; j <= l; ++j) f += e[j] * a(i, j);
        const double hh = f / (h + h);
#pragma omp parallel for schedule(static)
        for (int j = 0; j <= l; ++j) e[j] -= hh * a(i, j);
        // Stage 2: rank-2 update, row j only touches a(j, 0..j).
#pragma omp parallel for schedule(dynamic)
        for (int j = 0; j <= l; ++j) {
          const double fj = a(i, j);
          const double gj = e[j];
          for (int k = 0; k <= j; ++k) a(j, k) -= fj * e[k] + gj * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
#pragma omp parallel for schedule(static)
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
        for (int k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

double pythag(double a, double b) {
  const double absa = std::abs(a);
  const double absb = std::abs(b);
  if (absa > absb) {
    const double r = absb / absa;
    return absa * std::sqrt(1.0 + r * r);
  }
  if (absb == 0.0) return 0.0;
  const double r = absa / absb;
  return absb * std::sqrt(1.0 + r * r);
}

}  // namespace

Matrix pairwise_sq_dists(const Matrix& x, Exec exec) {
  return exec == Exec::serial ? pairwise_sq_dists_serial(x) : pairwise_sq_dists_omp(x);
}

Matrix weighted_gram(const Matrix& u, const Vector& w, const std::vector<int>& rows,
                     const std::vector<int>& cols, Exec exec) {
  return exec == Exec::serial ? weighted_gram_serial(u, w, rows, cols)
                              : weighted_gram_omp(u, w, rows, cols);
}

void householder_tridiag(Matrix& a, Vector& d, Vector& e, Exec exec) {
  d.assign(a.rows(), 0.0);
  e.assign(a.rows(), 0.0);
  if (a.rows() == 0) return;
  if (a.rows() == 1) {
    d[0] = a(0, 0);
    a(0, 0) = 1.0;
    return;
  }
  if (exec == Exec::serial)
    householder_tridiag_serial(a, d, e);
  else
    householder_tridiag_omp(a, d, e);
  // shift subdiagonal to off[0..n-2]
  for (std::size_t k = 0; k + 1 < e.size(); ++k) e[k] = e[k + 1];
  e.back() = 0.0;
}

// QL with implicit shifts after Numerical Recipes tql2, 0-indexed.
QlStatus ql_implicit_shift(Vector& d, Vector& off, Matrix& z) {
  const int n = static_cast<int>(d.size());
  if (n <= 1) return {};
  Vector e(off);
  e.resize(n, 0.0);

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) + dd == dd) break;
      }
      if (m != l) {
        if (iter++ == 50) return {false, std::abs(e[l])};
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = pythag(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = r = pythag(f, g);
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  return {};
}

}  // namespace skl::kernels
