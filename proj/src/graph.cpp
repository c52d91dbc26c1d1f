#include "skl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "skl/errors.hpp"

namespace skl {

Matrix Graph::dense_similarity() const {
  Matrix s(n, n);
  for (const auto& e : edges) {
    s(e.i, e.j) = e.w;
    s(e.j, e.i) = e.w;
  }
  return s;
}

namespace {

void finish_edges(Graph& g, std::vector<Graph::Edge> edges) {
  std::sort(edges.begin(), edges.end(), [](const Graph::Edge& a, const Graph::Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  g.edges = std::move(edges);
  g.degrees.assign(g.n, 0.0);
  for (const auto& e : g.edges) {
    g.degrees[e.i] += e.w;
    g.degrees[e.j] += e.w;
  }
}

}  // namespace

Graph knn_graph(const Dataset& data, int k, kernels::Exec exec) {
  const int n = data.n();
  if (k < 1 || k >= n) throw ArgumentError("knn_graph: need 1 <= k < n");

  const Matrix d2 = kernels::pairwise_sq_dists(data.features, exec);

  std::set<std::pair<int, int>> picked;
  std::vector<int> cand(n - 1);
  for (int i = 0; i < n; ++i) {
    int m = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) cand[m++] = j;
    // ties between equidistant neighbours go to the lower index
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), [&](int a, int b) {
      const double da = d2(i, a), db = d2(i, b);
      return da != db ? da < db : a < b;
    });
    for (int t = 0; t < k; ++t) {
      const int j = cand[t];
      picked.emplace(std::min(i, j), std::max(i, j));
    }
  }

  Graph g;
  g.n = n;
  std::vector<Graph::Edge> edges;
  edges.reserve(picked.size());
  for (const auto& [i, j] : picked) edges.push_back({i, j, d2(i, j)});
  finish_edges(g, std::move(edges));

  // k >= 1 already touches every vertex; keep the nearest-neighbour repair as
  // a guard so no vertex reaches the Laplacian without an edge. Zero-distance
  // edges are legal here, so "isolated" means no incident edge at all.
  std::vector<int> incident(n, 0);
  for (const auto& e : g.edges) {
    ++incident[e.i];
    ++incident[e.j];
  }
  for (int i = 0; i < n; ++i) {
    if (incident[i] > 0 || n < 2) continue;
    int best = i == 0 ? 1 : 0;
    for (int j = 0; j < n; ++j)
      if (j != i && d2(i, j) < d2(i, best)) best = j;
    auto edges2 = g.edges;
    edges2.push_back({std::min(i, best), std::max(i, best), d2(i, best)});
    finish_edges(g, std::move(edges2));
    ++incident[i];
    ++incident[best];
  }
  return g;
}

Graph gaussian_weights(const Graph& g) {
  if (g.edges.empty()) throw ArgumentError("gaussian_weights: graph has no edges");
  double sigma2 = 0.0;
  for (const auto& e : g.edges) sigma2 += e.w;
  sigma2 /= static_cast<double>(g.edges.size());
  if (sigma2 == 0.0) {
    std::fprintf(stderr,
                 "gaussian_weights: all edge distances are zero, substituting sigma_g^2 = 1\n");
    sigma2 = 1.0;
  }
  Graph out;
  out.n = g.n;
  std::vector<Graph::Edge> edges = g.edges;
  for (auto& e : edges) e.w = std::exp(-e.w / (2.0 * sigma2));
  finish_edges(out, std::move(edges));
  return out;
}

Laplacian normalized_laplacian(const Graph& g) {
  for (int i = 0; i < g.n; ++i)
    if (!(g.degrees[i] > 0.0)) throw ArgumentError("normalized_laplacian: isolated vertex");
  Laplacian l;
  l.m = Matrix::identity(g.n);
  for (const auto& e : g.edges) {
    const double v = e.w / std::sqrt(g.degrees[e.i] * g.degrees[e.j]);
    l.m(e.i, e.j) -= v;
    l.m(e.j, e.i) -= v;
  }
  return l;
}

EigenSystem laplacian_power(const EigenSystem& eig, int p) {
  if (p < 1) throw ArgumentError("laplacian_power: p must be >= 1");
  EigenSystem out = eig;
  if (p == 1) return out;
  for (double& g : out.gamma) {
    const double base = std::max(g, 0.0);  // round-off can leave gamma at -1e-12
    double v = base;
    for (int t = 1; t < p; ++t) v *= base;
    g = v;
  }
  return out;
}

double manifold_regularizer(const Matrix& k, const Laplacian& l) {
  const std::size_t n = l.m.rows();
  if (k.rows() != n || k.cols() != n)
    throw ArgumentError("manifold_regularizer: dimension mismatch");
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) tr += k(i, j) * l.m(j, i);
  return tr;
}

}  // namespace skl
