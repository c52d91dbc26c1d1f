#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace skl::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Closed-form spectrum vs. coordinate-wise golden-section minimization:
// 100 random instances (n <= 30) x C in {0.1,1,10} x mu in {1e-3,1,1e3}.
CheckResult spectrum_closed_form(std::uint64_t seed);

// Closed-form mu* vs. the honest alignment grid on 50 random unclipped
// instances.
CheckResult alignment_closed_form(std::uint64_t seed);

// Parameter independence: fit_skl(mu = mu*) reproduces fit_skl_kta decision
// values for C in {0.01, 1, 100}, plus the lambda_bar = C lambda* + 1 identity.
CheckResult parameter_independence(std::uint64_t seed);

// Monte-Carlo upper-bound slack over random PSD kernels, plus the
// block-diagonal equality construction.
CheckResult zero_padding_upper_bound(std::uint64_t seed);

// Double computation of the manifold-regularizer identity on random graphs
// and embeddings.
CheckResult regularizer_identity(std::uint64_t seed);

// Eigendecomposition contract: orthonormality, reconstruction, PSD floor,
// and zero-eigenvalue count vs. union-find component count.
CheckResult eigen_contract(std::uint64_t seed);

// Dual objective at the closed-form solution vs. the optimal-value
// functional, and a finite-difference gradient probe.
CheckResult rls_duality(std::uint64_t seed);

// The full suite in a fixed order.
std::vector<CheckResult> run_all(std::uint64_t seed);

}  // namespace skl::checks
