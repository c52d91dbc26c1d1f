#pragma once

#include <cstdint>

#include "skl/graph.hpp"
#include "skl/matrix.hpp"
#include "skl/skl.hpp"

namespace skl::oracle {

// Brute-force ground truth for the closed forms. Nothing in here calls the
// closed-form routines it is used to verify; spectra and alignments are
// recomputed from their defining formulas and optimized numerically.

// Minimizes the diagonalized objective coordinate by coordinate with
// golden-section search (each 1-D piece is convex on lambda >= 0).
Vector minimize_f_numeric(const SpectralCoefficients& co, double mu, double c);

struct KtaGridResult {
  double mu = 0.0;
  double kta = 0.0;
  bool degenerate = false;  // alignment constant across the entire grid
};

// Coarse 200-point log grid over mu in [1e-12, 1e6], refined by
// golden-section around the best cell to 1e-6 relative. Evaluates the
// alignment of the clipped spectrum honestly.
KtaGridResult maximize_kta_grid(const SpectralCoefficients& co, double c);

// y^T (K + I/C)^{-1} y - y_l^T (K_ll + I/C)^{-1} y_l with y the zero-padded
// labels; nonnegative for PSD K.
double upper_bound_slack(const Matrix& k, const Vector& y_l, double c);

// Monte-Carlo bound check over random PSD kernels K = M M^T and random +-1
// labels; returns the smallest slack seen. Trial t uses seed + t.
double check_upper_bound(int n, int n_l, double c, int trials, std::uint64_t seed);

// | sum_ij S_ij || v_i/sqrt(d_i) - v_j/sqrt(d_j) ||^2 - 2 tr(V^T L V) |
// normalized by 1 + |tr(V^T L V)|. Rows of v are the embeddings.
double regularizer_identity(const Matrix& v, const Graph& g);

}  // namespace skl::oracle
