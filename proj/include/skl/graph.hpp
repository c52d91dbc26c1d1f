#pragma once

#include <vector>

#include "skl/dataset.hpp"
#include "skl/eigen.hpp"
#include "skl/kernels.hpp"
#include "skl/matrix.hpp"

namespace skl {

// Sparse symmetric similarity graph. Edges are stored once with i < j and
// sorted lexicographically, so S = S^T holds exactly by construction; the
// diagonal is implicitly zero.
struct Graph {
  struct Edge {
    int i, j;
    double w;
  };

  int n = 0;
  std::vector<Edge> edges;
  Vector degrees;  // d_i = sum of incident weights

  // Densifies S; mostly for tests and the manifold-regularizer oracle.
  Matrix dense_similarity() const;
};

struct Laplacian {
  Matrix m;  // dense symmetric n x n

  int n() const { return static_cast<int>(m.rows()); }
};

// Mutual k-nearest-neighbour graph (OR-union): edge (i,j) exists when j is
// among the k Euclidean-nearest neighbours of i or vice versa. Equidistant
// candidates are broken toward the lower index. Edge weights hold the squared
// Euclidean distance until gaussian_weights replaces them.
Graph knn_graph(const Dataset& data, int k, kernels::Exec exec = kernels::Exec::parallel);

// Replaces each squared-distance weight by exp(-dist2 / (2 sigma_g2)) with
// sigma_g2 the mean squared distance over the edge set. A degenerate all-zero
// edge set substitutes sigma_g2 = 1 and warns on stderr.
Graph gaussian_weights(const Graph& g);

// L = I - D^{-1/2} S D^{-1/2}; requires every degree positive.
Laplacian normalized_laplacian(const Graph& g);

// Realizes L^p on a decomposed Laplacian: gamma_i -> gamma_i^p, eigenvectors
// untouched. p must be >= 1.
EigenSystem laplacian_power(const EigenSystem& eig, int p);

// tr(K L) for a kernel matrix of the same order.
double manifold_regularizer(const Matrix& k, const Laplacian& l);

}  // namespace skl
