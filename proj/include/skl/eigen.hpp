#pragma once

#include "skl/kernels.hpp"
#include "skl/matrix.hpp"

namespace skl {

// Full eigendecomposition of a dense symmetric matrix: u columns are
// orthonormal eigenvectors, gamma the matching eigenvalues in ascending order.
struct EigenSystem {
  Matrix u;
  Vector gamma;

  int n() const { return static_cast<int>(gamma.size()); }
};

// Symmetric eigendecomposition via Householder tridiagonalization followed by
// implicit-shift QL. The input is symmetrized as (M + M^T)/2 first; asymmetry
// beyond 1e-10 relative or non-finite entries raise ArgumentError. Eigenpairs
// are sorted ascending and each eigenvector is sign-fixed so its entry of
// largest magnitude is positive, making the output deterministic.
EigenSystem eig_sym(const Matrix& m, kernels::Exec exec = kernels::Exec::parallel);

}  // namespace skl
