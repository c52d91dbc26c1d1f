#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skl/dataset.hpp"
#include "skl/eigen.hpp"
#include "skl/kernels.hpp"
#include "skl/matrix.hpp"

namespace skl {

// Targets for the labeled block. Two classes use a single +-1 column; more
// classes use one-hot rows.
struct LabelMatrix {
  Matrix y;        // n_l x columns
  int classes = 0;

  bool binary() const { return classes == 2; }
  int n_l() const { return static_cast<int>(y.rows()); }

  static LabelMatrix from_labels(std::span<const int> labels_l, int class_count);

  // <Y Y^T, Y Y^T>_F, the squared Frobenius norm of the ideal kernel
  // (n_l^2 in the binary +-1 case).
  double ideal_frob_sq() const;
};

// Per-eigenvector quantities behind every closed form: a_i the squared
// projections of the labels onto eigenvector i through the labeled rows,
// b_i the ridged eigenvalue gamma_i + eps.
struct SpectralCoefficients {
  Vector a;
  Vector b;
  int n = 0;
  int n_l = 0;
  double ideal_frob_sq = 0.0;
};

SpectralCoefficients spectral_coefficients(const EigenSystem& eig, const LabelMatrix& y,
                                           double eps);

// Closed-form spectrum lambda_i = max(0, sqrt(a_i / (2 mu b_i)) - 1/C).
Vector lambda_star(const SpectralCoefficients& co, double mu, double c);

// Diagonalized objective 1/2 sum a_i/(lambda_i + 1/C) + mu sum lambda_i b_i.
double objective_F(const SpectralCoefficients& co, const Vector& spectrum, double mu, double c);

// Kernel target alignment sum(lambda_i a_i) / sqrt(sum(lambda_i^2) * <YY^T,YY^T>_F).
double kta(const SpectralCoefficients& co, const Vector& spectrum);

// Closed-form alignment-optimal trade-off
// mu* = ((ybar ubar - zbar xbar) / (zbar ubar - (n/C^2) xbar))^2.
double mu_star(const SpectralCoefficients& co, double c);

// Parameter-free spectrum lambda_bar_i = |(zhat uhat - n xbar)/(ybar uhat - zhat xbar)|
// * sqrt(a_i / (2 b_i)); contains neither C nor mu.
Vector lambda_bar(const SpectralCoefficients& co);

enum class FitKind { skl_kta, skl, diffusion, gaussian_field };

enum class TransformKind { diffusion, gaussian_field };

// Parametric spectral transforms kept for comparison: diffusion
// exp(-sigma2/2 * gamma) and Gaussian field 1/(gamma + eps).
Vector parametric_transform(const EigenSystem& eig, TransformKind kind, double param);

// A fitted transductive model. Immutable after fit; share freely across
// threads. Parameter-free fits store neither C nor mu.
struct SklModel {
  std::shared_ptr<const EigenSystem> eig;
  Vector spectrum;
  LabelMatrix y_l;
  Matrix alpha;  // n_l x columns, decision coefficients
  FitKind kind = FitKind::skl_kta;
  double eps = 0.0;
  std::optional<double> c;
  std::optional<double> mu;
  std::optional<double> transform_param;
  std::string dataset_digest;

  int n() const { return eig->n(); }
  int n_l() const { return y_l.n_l(); }
  bool parameter_free() const { return kind == FitKind::skl_kta; }
};

// Parameter-free fit: spectrum lambda_bar, decision
// f(q) = (Kbar - I)_{q,l} Kbar_{l,l}^{-1} Y_l.
SklModel fit_skl_kta(const Dataset& data, std::shared_ptr<const EigenSystem> eig, double eps);

// Parametric fit: spectrum lambda*(mu, C), decision
// f(q) = K_{q,l} (K_{l,l} + I/C)^{-1} Y_l.
SklModel fit_skl(const Dataset& data, std::shared_ptr<const EigenSystem> eig, double c, double mu,
                 double eps);

// Fit with a transform-generated spectrum; prediction follows the parametric
// decision rule with trade-off C.
SklModel fit_parametric_transform(const Dataset& data, std::shared_ptr<const EigenSystem> eig,
                                  TransformKind kind, double param, double c, double eps);

struct Prediction {
  Matrix values;            // |query| x columns
  std::vector<int> labels;  // class ids
};

// Decision values and class labels for the queried point indices (typically
// the unlabeled block n_l..n-1). Binary ties at 0 go to class 1; multi-class
// ties go to the lowest class id.
Prediction predict(const SklModel& model, const std::vector<int>& query,
                   kernels::Exec exec = kernels::Exec::parallel);

std::string dataset_digest(const Dataset& data);

}  // namespace skl
