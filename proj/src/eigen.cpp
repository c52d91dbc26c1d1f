#include "skl/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "skl/errors.hpp"

namespace skl {

EigenSystem eig_sym(const Matrix& m, kernels::Exec exec) {
  if (m.rows() != m.cols()) throw ArgumentError("eig_sym: matrix must be square");
  const std::size_t n = m.rows();

  double scale = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) throw ArgumentError("eig_sym: non-finite entry");
    scale = std::max(scale, std::abs(m.data()[i]));
  }
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
  if (asym > 1e-10 * (1.0 + scale))
    throw ArgumentError("eig_sym: input asymmetry exceeds tolerance");

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));

  Vector d, e;
  kernels::householder_tridiag(a, d, e, exec);
  const auto status = kernels::ql_implicit_shift(d, e, a);
  if (!status.converged) {
    std::ostringstream msg;
    msg << "eig_sym: QL failed to converge, off-diagonal residual " << status.off_residual;
    throw NumericalError(msg.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

  EigenSystem out;
  out.gamma.resize(n);
  out.u = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.gamma[c] = d[src];
    // sign convention: entry of largest magnitude positive
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = std::abs(a(r, src));
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    const double sign = a(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.u(r, c) = sign * a(r, src);
  }
  return out;
}

}  // namespace skl
