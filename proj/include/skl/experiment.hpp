#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "skl/dataset.hpp"

namespace skl {

// Standard normal quantile function (inverse CDF); rational approximation
// polished with Halley steps against the erfc-based CDF.
double normal_quantile(double p);

// Distance between the two G50C class means, chosen so the Bayes error of the
// equal-prior unit-covariance mixture is 5%.
double g50c_mean_separation();

// Two 50-dimensional unit-covariance Gaussians, equal priors, n = 550,
// means +-(delta/2) e_1. Fully labeled; masking happens at split time.
Dataset gen_g50c(std::uint64_t seed);

// Random labeled/unlabeled splits: each mask lists n_l dataset rows drawn
// from the ground-truth-labeled pool, rejection-sampled until every class is
// covered. Deterministic in seed.
std::vector<std::vector<int>> make_splits(const Dataset& data, int n_l, int splits,
                                          std::uint64_t seed);

struct GeneratorSpec {
  std::string name;  // "g50c"
  std::uint64_t seed = 0;
};

struct AlgorithmSpec {
  std::string name = "skl_kta";  // skl_kta | skl | rls_baseline | diffusion | gaussian_field
  double c = 1.0;
  double mu = 1.0;
  double sigma2 = 1.0;
  double eps_k = 1.0;
};

struct ExperimentConfig {
  std::variant<std::string, GeneratorSpec> dataset;
  std::optional<DatasetFormat> format;  // inferred from the extension when absent
  int k = 10;
  int p = 1;
  double eps = 1e-6;
  AlgorithmSpec algorithm;
  int splits = 10;
  int n_l = 1;
  std::uint64_t seed = 0;
  bool recompute_eig_per_split = false;  // test hook; not part of the JSON schema
};

ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct SplitResult {
  std::optional<double> accuracy;  // empty when no scorable unlabeled point exists
  int n_l = 0;
  int n_u = 0;
  std::vector<int> predicted;  // labels in the original input order, length n
};

struct PhaseTiming {
  double graph_s = 0.0;
  double eig_s = 0.0;
  double fit_s = 0.0;
  double predict_s = 0.0;
};

struct Report {
  nlohmann::json config_echo;
  int n = 0;
  int d = 0;
  int classes = 0;
  std::string digest;
  std::vector<SplitResult> splits;
  std::optional<double> mean_accuracy;
  std::optional<double> std_accuracy;  // sample standard deviation
  PhaseTiming timing;

  nlohmann::json to_json() const;
};

// Full transductive protocol: graph and eigendecomposition built once and
// shared across splits, one fit/predict/score pass per split.
Report run_experiment(const ExperimentConfig& config);

// Per-eigenpair table (index, gamma, a, lambda_bar) for the first split,
// CSV on the stream, rows ascending in gamma.
void dump_spectrum(const ExperimentConfig& config, std::ostream& out);

}  // namespace skl
