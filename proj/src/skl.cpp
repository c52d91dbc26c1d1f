#include "skl/skl.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "skl/errors.hpp"
#include "skl/linalg.hpp"

namespace skl {

LabelMatrix LabelMatrix::from_labels(std::span<const int> labels_l, int class_count) {
  if (class_count < 2) throw ValidationError("LabelMatrix: need at least two classes");
  LabelMatrix out;
  out.classes = class_count;
  const std::size_t n_l = labels_l.size();
  if (n_l == 0) throw ValidationError("LabelMatrix: no labeled points");
  for (int y : labels_l)
    if (y < 0 || y >= class_count) throw ValidationError("LabelMatrix: label out of range");

  if (class_count == 2) {
    out.y = Matrix(n_l, 1);
    for (std::size_t i = 0; i < n_l; ++i) out.y(i, 0) = labels_l[i] == 1 ? 1.0 : -1.0;
  } else {
    out.y = Matrix(n_l, class_count);
    for (std::size_t i = 0; i < n_l; ++i) out.y(i, static_cast<std::size_t>(labels_l[i])) = 1.0;
  }
  return out;
}

double LabelMatrix::ideal_frob_sq() const {
  // ||Y^T Y||_F^2 = <YY^T, YY^T>_F
  const std::size_t c = y.cols();
  double total = 0.0;
  for (std::size_t p = 0; p < c; ++p)
    for (std::size_t q = 0; q < c; ++q) {
      double g = 0.0;
      for (std::size_t i = 0; i < y.rows(); ++i) g += y(i, p) * y(i, q);
      total += g * g;
    }
  return total;
}

SpectralCoefficients spectral_coefficients(const EigenSystem& eig, const LabelMatrix& y,
                                           double eps) {
  if (eps <= 0.0) throw ArgumentError("spectral_coefficients: ridge eps must be positive");
  const int n = eig.n();
  const int n_l = y.n_l();
  if (n_l > n) throw ArgumentError("spectral_coefficients: more labels than points");

  SpectralCoefficients co;
  co.n = n;
  co.n_l = n_l;
  co.ideal_frob_sq = y.ideal_frob_sq();
  co.a.assign(n, 0.0);
  co.b.resize(n);
  const std::size_t cols = y.y.cols();
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      double proj = 0.0;
      for (int r = 0; r < n_l; ++r) proj += eig.u(r, i) * y.y(r, k);
      acc += proj * proj;
    }
    co.a[i] = acc;
    co.b[i] = eig.gamma[i] + eps;
  }
  return co;
}

Vector lambda_star(const SpectralCoefficients& co, double mu, double c) {
  if (mu <= 0.0) throw ArgumentError("lambda_star: mu must be positive");
  if (c <= 0.0) throw ArgumentError("lambda_star: C must be positive");
  Vector lam(co.a.size());
  for (std::size_t i = 0; i < lam.size(); ++i)
    lam[i] = std::max(0.0, std::sqrt(co.a[i] / (2.0 * mu * co.b[i])) - 1.0 / c);
  return lam;
}

double objective_F(const SpectralCoefficients& co, const Vector& spectrum, double mu, double c) {
  if (spectrum.size() != co.a.size()) throw ArgumentError("objective_F: spectrum length mismatch");
  double fit = 0.0, reg = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    fit += co.a[i] / (spectrum[i] + 1.0 / c);
    reg += spectrum[i] * co.b[i];
  }
  return 0.5 * fit + mu * reg;
}

double kta(const SpectralCoefficients& co, const Vector& spectrum) {
  if (spectrum.size() != co.a.size()) throw ArgumentError("kta: spectrum length mismatch");
  double num = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    num += spectrum[i] * co.a[i];
    sq += spectrum[i] * spectrum[i];
  }
  if (sq == 0.0) throw NumericalError("kta: undefined for an all-zero spectrum");
  return num / std::sqrt(sq * co.ideal_frob_sq);
}

namespace {

struct HatSums {
  double xbar = 0.0;  // sum a_i sqrt(a_i / 2 b_i)
  double ybar = 0.0;  // sum a_i / (2 b_i)
  double zhat = 0.0;  // sum sqrt(a_i / 2 b_i)
  double uhat = 0.0;  // sum a_i
};

HatSums hat_sums(const SpectralCoefficients& co) {
  HatSums s;
  for (std::size_t i = 0; i < co.a.size(); ++i) {
    const double t = std::sqrt(co.a[i] / (2.0 * co.b[i]));
    s.xbar += co.a[i] * t;
    s.ybar += co.a[i] / (2.0 * co.b[i]);
    s.zhat += t;
    s.uhat += co.a[i];
  }
  return s;
}

}  // namespace

// Cancellation in the closed-form ratios leaves round-off noise rather than
// exact zeros, so degeneracy is detected relative to the term magnitudes.
constexpr double kDegenerateTol = 1e-12;

double mu_star(const SpectralCoefficients& co, double c) {
  if (c <= 0.0) throw ArgumentError("mu_star: C must be positive");
  const HatSums s = hat_sums(co);
  if (s.uhat == 0.0) throw DegenerateInstanceError("mu_star: all a_i are zero");
  const double n = static_cast<double>(co.n);
  // Both differences cancel heavily on near-degenerate inputs; they are
  // evaluated through the same C-free sums lambda_bar uses, with C applied
  // once at the end, so the two closed forms stay consistent to round-off.
  const double num = s.ybar * s.uhat - s.zhat * s.xbar;
  const double den = s.zhat * s.uhat - n * s.xbar;
  if (std::abs(den) <= kDegenerateTol * (std::abs(s.zhat * s.uhat) + std::abs(n * s.xbar)))
    throw DegenerateInstanceError("mu_star: vanishing denominator in the closed form");
  if (std::abs(num) <= kDegenerateTol * (std::abs(s.ybar * s.uhat) + std::abs(s.zhat * s.xbar)))
    throw DegenerateInstanceError("mu_star: stationarity equation degenerates (mu* = 0)");
  const double ratio = c * num / den;
  const double mu = ratio * ratio;
  if (!std::isfinite(mu) || mu <= 0.0)
    throw DegenerateInstanceError("mu_star: closed form gave a non-positive or non-finite mu");
  return mu;
}

Vector lambda_bar(const SpectralCoefficients& co) {
  const HatSums s = hat_sums(co);
  if (s.uhat == 0.0) throw DegenerateInstanceError("lambda_bar: all a_i are zero");
  const double n = static_cast<double>(co.n);
  const double num = s.zhat * s.uhat - n * s.xbar;
  const double den = s.ybar * s.uhat - s.zhat * s.xbar;
  if (std::abs(den) <= kDegenerateTol * (std::abs(s.ybar * s.uhat) + std::abs(s.zhat * s.xbar)))
    throw DegenerateInstanceError("lambda_bar: vanishing denominator in the closed form");
  const double r = std::abs(num / den);
  if (!std::isfinite(r)) throw DegenerateInstanceError("lambda_bar: non-finite spectrum ratio");
  Vector lam(co.a.size());
  for (std::size_t i = 0; i < lam.size(); ++i)
    lam[i] = r * std::sqrt(co.a[i] / (2.0 * co.b[i]));
  return lam;
}

Vector parametric_transform(const EigenSystem& eig, TransformKind kind, double param) {
  if (param <= 0.0) throw ArgumentError("parametric_transform: parameter must be positive");
  Vector lam(eig.gamma.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double g = eig.gamma[i];
    lam[i] = kind == TransformKind::diffusion ? std::exp(-0.5 * param * g) : 1.0 / (g + param);
  }
  return lam;
}

namespace {

std::vector<int> iota_indices(int lo, int hi) {
  std::vector<int> idx;
  idx.reserve(hi - lo);
  for (int i = lo; i < hi; ++i) idx.push_back(i);
  return idx;
}

LabelMatrix labeled_targets(const Dataset& data) {
  return LabelMatrix::from_labels(std::span<const int>(data.labels.data(), data.n_l),
                                  data.class_count);
}

void check_training_labels(const Dataset& data) {
  std::vector<char> seen(data.class_count, 0);
  for (int i = 0; i < data.n_l; ++i) seen[data.labels[i]] = 1;
  for (int c = 0; c < data.class_count; ++c)
    if (!seen[c]) throw ValidationError("fit: class " + std::to_string(c) + " has no labeled point");
}

// Decision coefficients: solve G alpha = Y_l for the labeled-block Gram G.
Matrix decision_coefficients(const Matrix& g_ll, const Matrix& y) {
  return spd_solve_checked(g_ll, y);
}

}  // namespace

SklModel fit_skl_kta(const Dataset& data, std::shared_ptr<const EigenSystem> eig, double eps) {
  if (!eig || eig->n() != data.n()) throw ArgumentError("fit_skl_kta: eigensystem size mismatch");
  check_training_labels(data);

  SklModel model;
  model.kind = FitKind::skl_kta;
  model.eig = std::move(eig);
  model.eps = eps;
  model.y_l = labeled_targets(data);
  model.dataset_digest = dataset_digest(data);

  const SpectralCoefficients co = spectral_coefficients(*model.eig, model.y_l, eps);
  model.spectrum = lambda_bar(co);

  const auto labeled = iota_indices(0, data.n_l);
  const Matrix kbar_ll = kernels::weighted_gram(model.eig->u, model.spectrum, labeled, labeled);
  model.alpha = decision_coefficients(kbar_ll, model.y_l.y);
  return model;
}

SklModel fit_skl(const Dataset& data, std::shared_ptr<const EigenSystem> eig, double c, double mu,
                 double eps) {
  if (!eig || eig->n() != data.n()) throw ArgumentError("fit_skl: eigensystem size mismatch");
  if (c <= 0.0) throw ArgumentError("fit_skl: C must be positive");
  if (mu <= 0.0) throw ArgumentError("fit_skl: mu must be positive");
  check_training_labels(data);

  SklModel model;
  model.kind = FitKind::skl;
  model.eig = std::move(eig);
  model.eps = eps;
  model.c = c;
  model.mu = mu;
  model.y_l = labeled_targets(data);
  model.dataset_digest = dataset_digest(data);

  const SpectralCoefficients co = spectral_coefficients(*model.eig, model.y_l, eps);
  model.spectrum = lambda_star(co, mu, c);

  const auto labeled = iota_indices(0, data.n_l);
  Matrix k_ll = kernels::weighted_gram(model.eig->u, model.spectrum, labeled, labeled);
  for (int i = 0; i < data.n_l; ++i) k_ll(i, i) += 1.0 / c;
  model.alpha = decision_coefficients(k_ll, model.y_l.y);
  return model;
}

SklModel fit_parametric_transform(const Dataset& data, std::shared_ptr<const EigenSystem> eig,
                                  TransformKind kind, double param, double c, double eps) {
  if (!eig || eig->n() != data.n())
    throw ArgumentError("fit_parametric_transform: eigensystem size mismatch");
  if (c <= 0.0) throw ArgumentError("fit_parametric_transform: C must be positive");
  check_training_labels(data);

  SklModel model;
  model.kind = kind == TransformKind::diffusion ? FitKind::diffusion : FitKind::gaussian_field;
  model.eig = std::move(eig);
  model.eps = eps;
  model.c = c;
  model.transform_param = param;
  model.y_l = labeled_targets(data);
  model.dataset_digest = dataset_digest(data);
  model.spectrum = parametric_transform(*model.eig, kind, param);

  const auto labeled = iota_indices(0, data.n_l);
  Matrix k_ll = kernels::weighted_gram(model.eig->u, model.spectrum, labeled, labeled);
  for (int i = 0; i < data.n_l; ++i) k_ll(i, i) += 1.0 / c;
  model.alpha = decision_coefficients(k_ll, model.y_l.y);
  return model;
}

Prediction predict(const SklModel& model, const std::vector<int>& query, kernels::Exec exec) {
  const int n = model.n();
  for (int q : query)
    if (q < 0 || q >= n) throw ArgumentError("predict: query index out of range");

  Prediction out;
  const std::size_t cols = model.y_l.y.cols();
  if (query.empty()) {
    out.values = Matrix(0, cols);
    return out;
  }

  const auto labeled = iota_indices(0, model.n_l());
  Matrix g = kernels::weighted_gram(model.eig->u, model.spectrum, query, labeled, exec);
  if (model.parameter_free()) {
    // decision uses (Kbar - I)_{q,l}
    for (std::size_t r = 0; r < query.size(); ++r)
      if (query[r] < model.n_l()) g(r, static_cast<std::size_t>(query[r])) -= 1.0;
  }

  out.values = Matrix(query.size(), cols);
  for (std::size_t r = 0; r < query.size(); ++r)
    for (std::size_t k = 0; k < cols; ++k) {
      double s = 0.0;
      for (int j = 0; j < model.n_l(); ++j) s += g(r, j) * model.alpha(j, k);
      out.values(r, k) = s;
    }

  out.labels.resize(query.size());
  for (std::size_t r = 0; r < query.size(); ++r) {
    if (model.y_l.binary()) {
      out.labels[r] = out.values(r, 0) >= 0.0 ? 1 : 0;
    } else {
      std::size_t best = 0;
      for (std::size_t k = 1; k < cols; ++k)
        if (out.values(r, k) > out.values(r, best)) best = k;
      out.labels[r] = static_cast<int>(best);
    }
  }
  return out;
}

namespace {

std::uint64_t fnv1a64(std::uint64_t h, const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string dataset_digest(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t header[4] = {data.n(), data.dim(), data.n_l, data.class_count};
  h = fnv1a64(h, header, sizeof(header));
  h = fnv1a64(h, data.features.data(), data.features.size() * sizeof(double));
  h = fnv1a64(h, data.labels.data(), data.labels.size() * sizeof(int));
  std::ostringstream s;
  s << std::hex << h;
  return s.str();
}

}  // namespace skl
