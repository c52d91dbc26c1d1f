// Times the OpenMP kernels against their serial references and checks that
// both produce identical bits.
#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "skl/eigen.hpp"
#include "skl/kernels.hpp"
#include "skl/rng.hpp"

using skl::Matrix;
using skl::Vector;
using skl::kernels::Exec;

namespace {

double time_of(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, int n, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s n=%-5d serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n", name, n,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both paths run serially\n");
#endif

  skl::Rng rng(99);

  for (int n : {256, 512}) {
    Matrix x(n, 64);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    Matrix a, b;
    const double ts = time_of([&] { a = skl::kernels::pairwise_sq_dists(x, Exec::serial); });
    const double tp = time_of([&] { b = skl::kernels::pairwise_sq_dists(x, Exec::parallel); });
    report("pairwise_sq_dists", n, ts, tp, a == b);
  }

  for (int n : {256, 512}) {
    Matrix u(n, n);
    Vector w(n);
    for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] = rng.normal();
    for (double& v : w) v = rng.uniform(0.0, 2.0);
    std::vector<int> rows(n), cols(n);
    for (int i = 0; i < n; ++i) rows[i] = cols[i] = i;
    Matrix a, b;
    const double ts =
        time_of([&] { a = skl::kernels::weighted_gram(u, w, rows, cols, Exec::serial); });
    const double tp =
        time_of([&] { b = skl::kernels::weighted_gram(u, w, rows, cols, Exec::parallel); });
    report("weighted_gram", n, ts, tp, a == b);
  }

  for (int n : {256, 512}) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);

    Matrix qs = m, qp = m;
    Vector ds, es, dp, ep;
    const double ts =
        time_of([&] { skl::kernels::householder_tridiag(qs, ds, es, Exec::serial); });
    const double tp =
        time_of([&] { skl::kernels::householder_tridiag(qp, dp, ep, Exec::parallel); });
    report("householder_tridiag", n, ts, tp, qs == qp && ds == dp && es == ep);

    skl::EigenSystem a, b;
    const double tes = time_of([&] { a = skl::eig_sym(m, Exec::serial); });
    const double tep = time_of([&] { b = skl::eig_sym(m, Exec::parallel); });
    report("eig_sym", n, tes, tep, a.u == b.u && a.gamma == b.gamma);
  }
  return 0;
}
