#include <doctest.h>

#include "skl/kernels.hpp"
#include "test_support.hpp"

using skl::Matrix;
using skl::Vector;
using skl::kernels::Exec;
namespace ts = test_support;

TEST_CASE("pairwise_sq_dists matches a hand loop and both exec paths agree") {
  skl::Rng rng(1);
  const Matrix x = ts::random_matrix(rng, 23, 7);
  const Matrix serial = skl::kernels::pairwise_sq_dists(x, Exec::serial);
  const Matrix parallel = skl::kernels::pairwise_sq_dists(x, Exec::parallel);
  CHECK(serial == parallel);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    CHECK(serial(i, i) == 0.0);
    for (std::size_t j = 0; j < x.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) {
        const double d = x(i, k) - x(j, k);
        s += d * d;
      }
      CHECK(serial(i, j) == doctest::Approx(s).epsilon(1e-14));
      CHECK(serial(i, j) == serial(j, i));
    }
  }
}

TEST_CASE("weighted_gram matches the naive triple product on index blocks") {
  skl::Rng rng(2);
  const Matrix u = ts::random_matrix(rng, 12, 12);
  Vector w(12);
  for (double& v : w) v = rng.uniform(0.0, 2.0);
  const std::vector<int> rows = {0, 3, 7, 11};
  const std::vector<int> cols = {1, 2, 5};

  const Matrix serial = skl::kernels::weighted_gram(u, w, rows, cols, Exec::serial);
  const Matrix parallel = skl::kernels::weighted_gram(u, w, rows, cols, Exec::parallel);
  CHECK(serial == parallel);

  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      double s = 0.0;
      for (int k = 0; k < 12; ++k) s += u(rows[r], k) * w[k] * u(cols[c], k);
      CHECK(serial(r, c) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("householder_tridiag serial and parallel paths are bit-identical") {
  skl::Rng rng(3);
  for (int n : {2, 3, 17, 64}) {
    const Matrix m = ts::random_symmetric(rng, n);
    Matrix qs = m, qp = m;
    Vector ds, es, dp, ep;
    skl::kernels::householder_tridiag(qs, ds, es, Exec::serial);
    skl::kernels::householder_tridiag(qp, dp, ep, Exec::parallel);
    CHECK(qs == qp);
    CHECK(ds == dp);
    CHECK(es == ep);
  }
}

TEST_CASE("householder_tridiag preserves the similarity transform") {
  skl::Rng rng(4);
  const int n = 20;
  const Matrix m = ts::random_symmetric(rng, n);
  Matrix q = m;
  Vector d, e;
  skl::kernels::householder_tridiag(q, d, e, Exec::parallel);

  // Q^T M Q should be tridiagonal with diag d and subdiag e
  const Matrix t = skl::matmul(skl::transpose(q), skl::matmul(m, q));
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(t(i, i) - d[i]) < 1e-9);
    if (i + 1 < n) CHECK(std::abs(t(i, i + 1) - e[i]) < 1e-9);
    for (int j = i + 2; j < n; ++j) CHECK(std::abs(t(i, j)) < 1e-9);
  }
}
