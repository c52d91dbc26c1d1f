#pragma once

#include <vector>

#include "skl/matrix.hpp"

namespace skl::kernels {

// Every kernel exists in two variants: a plain serial reference and an
// OpenMP-parallel version. Both compute each output element with the same
// summation order, so their results are bit-identical; the tests assert
// exact equality and the bench_kernels tool compares their wall clock.
enum class Exec { serial, parallel };

// n x n matrix of squared Euclidean distances between the rows of x.
Matrix pairwise_sq_dists(const Matrix& x, Exec exec = Exec::parallel);

// Block of U * diag(w) * U^T restricted to the given row/column index sets:
// out(r, s) = sum_k U(rows[r], k) * w[k] * U(cols[s], k).
Matrix weighted_gram(const Matrix& u, const Vector& w, const std::vector<int>& rows,
                     const std::vector<int>& cols, Exec exec = Exec::parallel);

// Householder reduction of a symmetric matrix to tridiagonal form.
// On entry a holds the symmetric input; on return it holds the accumulated
// orthogonal transform Q (Q^T A Q tridiagonal). diag receives the diagonal,
// off the subdiagonal (off[0..n-2]; off[n-1] is set to 0).
void householder_tridiag(Matrix& a, Vector& diag, Vector& off, Exec exec = Exec::parallel);

struct QlStatus {
  bool converged = true;
  double off_residual = 0.0;  // largest |subdiagonal| left behind on failure
};

// Implicit-shift QL on a tridiagonal matrix. diag/off as produced by
// householder_tridiag; z accumulates the rotations (pass Q to get full
// eigenvectors). Eigenvalues land in diag, unsorted. Sequential by nature;
// shared by both Exec paths.
QlStatus ql_implicit_shift(Vector& diag, Vector& off, Matrix& z);

}  // namespace skl::kernels
