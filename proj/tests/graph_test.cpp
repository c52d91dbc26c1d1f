#include <doctest.h>

#include <cmath>

#include "skl/errors.hpp"
#include "skl/graph.hpp"
#include "test_support.hpp"

using skl::Dataset;
using skl::Graph;
using skl::Laplacian;
using skl::Matrix;
using skl::Vector;
namespace ts = test_support;

namespace {

Dataset points(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix x(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) x(r, c++) = v;
    ++r;
  }
  std::vector<int> labels(rows.size(), Dataset::kUnlabeled);
  labels[0] = 0;
  return skl::make_dataset(std::move(x), std::move(labels), 1);
}

bool has_edge(const Graph& g, int i, int j) {
  for (const auto& e : g.edges)
    if (e.i == std::min(i, j) && e.j == std::max(i, j)) return true;
  return false;
}

}  // namespace

TEST_CASE("knn on collinear points uses the OR-union") {
  const Dataset d = points({{0.0}, {1.0}, {3.0}});
  const Graph g = skl::knn_graph(d, 1);
  CHECK(g.edges.size() == 2);
  CHECK(has_edge(g, 0, 1));
  CHECK(has_edge(g, 1, 2));
}

TEST_CASE("two points, one edge") {
  const Dataset d = points({{0.0}, {2.0}});
  const Graph g = skl::knn_graph(d, 1);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].w == 4.0);  // squared distance until gaussian_weights
}

TEST_CASE("k must stay below n") {
  const Dataset d = points({{0.0}, {1.0}, {2.0}});
  CHECK_THROWS_AS(skl::knn_graph(d, 3), skl::ArgumentError);
  CHECK_THROWS_AS(skl::knn_graph(d, 0), skl::ArgumentError);
}

TEST_CASE("equidistant neighbours break ties toward the lower index") {
  const Dataset d = points({{0.0}, {1.0}, {-1.0}});
  const Graph g = skl::knn_graph(d, 1);
  // 0 ties between 1 and 2, picks 1; 1 and 2 both pick 0
  CHECK(g.edges.size() == 2);
  CHECK(has_edge(g, 0, 1));
  CHECK(has_edge(g, 0, 2));
  CHECK(!has_edge(g, 1, 2));
}

TEST_CASE("duplicate points at distance zero are legal") {
  const Dataset d = points({{1.0}, {1.0}});
  const Graph g = skl::gaussian_weights(skl::knn_graph(d, 1));
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].w == 1.0);  // exp(0) after the degenerate sigma substitution
}

TEST_CASE("gaussian weights use the mean edge distance") {
  const Dataset single = points({{0.0}, {std::sqrt(2.0)}});
  const Graph g1 = skl::gaussian_weights(skl::knn_graph(single, 1));
  CHECK(g1.edges[0].w == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

  // distances 1 and 3 -> sigma^2 = 2
  const Dataset three = points({{0.0}, {1.0}, {1.0 + std::sqrt(3.0)}});
  const Graph g3 = skl::gaussian_weights(skl::knn_graph(three, 1));
  REQUIRE(g3.edges.size() == 2);
  CHECK(g3.edges[0].w == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
  CHECK(g3.edges[1].w == doctest::Approx(std::exp(-0.75)).epsilon(1e-12));
}

TEST_CASE("gaussian weights are scale invariant") {
  skl::Rng rng(21);
  Matrix x = ts::random_matrix(rng, 12, 3);
  std::vector<int> labels(12, Dataset::kUnlabeled);
  labels[0] = 0;
  const Dataset d1 = skl::make_dataset(x, labels, 1);
  Matrix x2 = x;
  for (std::size_t i = 0; i < x2.size(); ++i) x2.data()[i] *= 4.0;  // exact in binary
  const Dataset d2 = skl::make_dataset(x2, labels, 1);

  const Graph g1 = skl::gaussian_weights(skl::knn_graph(d1, 3));
  const Graph g2 = skl::gaussian_weights(skl::knn_graph(d2, 3));
  REQUIRE(g1.edges.size() == g2.edges.size());
  for (std::size_t e = 0; e < g1.edges.size(); ++e) {
    CHECK(g1.edges[e].i == g2.edges[e].i);
    CHECK(g1.edges[e].j == g2.edges[e].j);
    CHECK(g1.edges[e].w == g2.edges[e].w);
  }
}

TEST_CASE("similarity is exactly symmetric with zero diagonal") {
  skl::Rng rng(22);
  Matrix x = ts::random_matrix(rng, 15, 4);
  std::vector<int> labels(15, Dataset::kUnlabeled);
  labels[0] = 0;
  const Dataset d = skl::make_dataset(std::move(x), std::move(labels), 1);
  const Graph g = skl::gaussian_weights(skl::knn_graph(d, 4));
  const Matrix s = g.dense_similarity();
  for (int i = 0; i < 15; ++i) {
    CHECK(s(i, i) == 0.0);
    for (int j = 0; j < 15; ++j) CHECK(s(i, j) == s(j, i));
  }
  for (int i = 0; i < 15; ++i) CHECK(g.degrees[i] > 0.0);
}

TEST_CASE("two-node normalized laplacian") {
  const Dataset d = points({{0.0}, {1.0}});
  const Laplacian l = skl::normalized_laplacian(skl::gaussian_weights(skl::knn_graph(d, 1)));
  CHECK(l.m(0, 0) == doctest::Approx(1.0));
  CHECK(l.m(0, 1) == doctest::Approx(-1.0));
  CHECK(l.m(1, 0) == doctest::Approx(-1.0));
  CHECK(l.m(1, 1) == doctest::Approx(1.0));
  const auto es = skl::eig_sym(l.m);
  CHECK(std::abs(es.gamma[0]) < 1e-12);
  CHECK(es.gamma[1] == doctest::Approx(2.0));
}

TEST_CASE("laplacian annihilates D^{1/2} 1 and stays inside [0, 2]") {
  skl::Rng rng(23);
  Matrix x = ts::random_matrix(rng, 30, 3);
  std::vector<int> labels(30, Dataset::kUnlabeled);
  labels[0] = 0;
  const Dataset d = skl::make_dataset(std::move(x), std::move(labels), 1);
  const Graph g = skl::gaussian_weights(skl::knn_graph(d, 4));
  const Laplacian l = skl::normalized_laplacian(g);

  for (int i = 0; i < 30; ++i) {
    double s = 0.0;
    for (int j = 0; j < 30; ++j) s += l.m(i, j) * std::sqrt(g.degrees[j]);
    CHECK(std::abs(s) < 1e-8);
  }
  const auto es = skl::eig_sym(l.m);
  CHECK(es.gamma.front() >= -1e-8);
  CHECK(es.gamma.back() <= 2.0 + 1e-8);
  // symmetric to 1e-12 absolute
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) CHECK(std::abs(l.m(i, j) - l.m(j, i)) <= 1e-12);
}

TEST_CASE("two separated clusters give two zero eigenvalues") {
  const Dataset d = points({{0.0}, {0.1}, {0.2}, {100.0}, {100.1}, {100.2}});
  const Graph g = skl::gaussian_weights(skl::knn_graph(d, 1));
  const auto es = skl::eig_sym(skl::normalized_laplacian(g).m);
  int zeros = 0;
  for (double v : es.gamma)
    if (v < 1e-8) ++zeros;
  CHECK(zeros == 2);
}

TEST_CASE("laplacian_power maps eigenvalues elementwise") {
  skl::EigenSystem es;
  es.u = Matrix::identity(3);
  es.gamma = {0.0, 0.5, 2.0};

  const auto p1 = skl::laplacian_power(es, 1);
  CHECK(p1.gamma == es.gamma);
  CHECK(p1.u == es.u);

  const auto p2 = skl::laplacian_power(es, 2);
  CHECK(p2.gamma == Vector{0.0, 0.25, 4.0});
  CHECK(p2.u == es.u);

  CHECK_THROWS_AS(skl::laplacian_power(es, 0), skl::ArgumentError);
}

TEST_CASE("manifold regularizer") {
  skl::Rng rng(24);
  Matrix x = ts::random_matrix(rng, 10, 2);
  std::vector<int> labels(10, Dataset::kUnlabeled);
  labels[0] = 0;
  const Dataset d = skl::make_dataset(std::move(x), std::move(labels), 1);
  const Laplacian l = skl::normalized_laplacian(skl::gaussian_weights(skl::knn_graph(d, 3)));

  // K = I gives tr(L)
  double tr_l = 0.0;
  for (int i = 0; i < 10; ++i) tr_l += l.m(i, i);
  CHECK(skl::manifold_regularizer(Matrix::identity(10), l) == doctest::Approx(tr_l));

  // K = 0 gives 0
  CHECK(skl::manifold_regularizer(Matrix(10, 10), l) == 0.0);

  // K = V^T V matches tr(V L V^T)
  const Matrix v = ts::random_matrix(rng, 4, 10);
  Matrix k(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      double s = 0.0;
      for (int r = 0; r < 4; ++r) s += v(r, i) * v(r, j);
      k(i, j) = s;
    }
  const Matrix vl = skl::matmul(v, l.m);
  double tr = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int i = 0; i < 10; ++i) tr += vl(r, i) * v(r, i);
  const double got = skl::manifold_regularizer(k, l);
  CHECK(std::abs(got - tr) <= 1e-10 * (1.0 + std::abs(tr)));

  CHECK_THROWS_AS(skl::manifold_regularizer(Matrix(3, 3), l), skl::ArgumentError);
}
