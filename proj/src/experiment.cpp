#include "skl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>

#include "skl/errors.hpp"
#include "skl/graph.hpp"
#include "skl/rls.hpp"
#include "skl/rng.hpp"
#include "skl/skl.hpp"

namespace skl {

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal_quantile: p must be in (0, 1)");

  // Acklam's rational approximation
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // two Halley steps against the exact CDF
  for (int it = 0; it < 2; ++it) {
    const double e = phi(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double g50c_mean_separation() { return 2.0 * normal_quantile(0.95); }

Dataset gen_g50c(std::uint64_t seed) {
  constexpr int n = 550;
  constexpr int d = 50;
  const double half = 0.5 * g50c_mean_separation();
  Rng rng(seed);
  Matrix x(n, d);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const int cls = static_cast<int>(rng.below(2));
    labels[i] = cls;
    for (int t = 0; t < d; ++t) x(i, t) = rng.normal();
    x(i, 0) += cls == 1 ? half : -half;
  }
  return make_dataset(std::move(x), std::move(labels));
}

std::vector<std::vector<int>> make_splits(const Dataset& data, int n_l, int splits,
                                          std::uint64_t seed) {
  if (splits < 1) throw ArgumentError("make_splits: splits must be >= 1");
  if (n_l < data.class_count)
    throw ArgumentError("make_splits: n_l smaller than the number of classes");
  const int pool = data.n_l;  // ground-truth-labeled points sit at the front
  if (n_l > pool) throw ArgumentError("make_splits: n_l exceeds the labeled pool");
  std::vector<char> in_pool_class(data.class_count, 0);
  for (int i = 0; i < pool; ++i) in_pool_class[data.labels[i]] = 1;
  for (int c = 0; c < data.class_count; ++c)
    if (!in_pool_class[c])
      throw ValidationError("make_splits: class " + std::to_string(c) + " has no labeled point");

  Rng rng(seed);
  std::vector<std::vector<int>> masks;
  masks.reserve(splits);
  std::vector<int> scratch(pool);
  for (int s = 0; s < splits; ++s) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == 10000)
        throw ValidationError("make_splits: could not cover every class");
      std::iota(scratch.begin(), scratch.end(), 0);
      for (int t = 0; t < n_l; ++t) {
        const int j = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(pool - t)));
        std::swap(scratch[t], scratch[j]);
      }
      std::vector<char> seen(data.class_count, 0);
      for (int t = 0; t < n_l; ++t) seen[data.labels[scratch[t]]] = 1;
      if (std::all_of(seen.begin(), seen.end(), [](char v) { return v != 0; })) {
        std::vector<int> mask(scratch.begin(), scratch.begin() + n_l);
        std::sort(mask.begin(), mask.end());
        masks.push_back(std::move(mask));
        break;
      }
    }
  }
  return masks;
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  try {
    if (!doc.contains("dataset")) throw ArgumentError("config: missing 'dataset'");
    const auto& ds = doc.at("dataset");
    if (ds.is_string()) {
      cfg.dataset = ds.get<std::string>();
    } else if (ds.is_object()) {
      GeneratorSpec gen;
      gen.name = ds.at("generator").get<std::string>();
      if (gen.name != "g50c") throw ArgumentError("config: unknown generator '" + gen.name + "'");
      if (ds.contains("seed")) gen.seed = ds.at("seed").get<std::uint64_t>();
      cfg.dataset = gen;
    } else {
      throw ArgumentError("config: 'dataset' must be a path or a generator object");
    }
    if (doc.contains("format")) {
      const auto f = doc.at("format").get<std::string>();
      if (f == "dense-csv")
        cfg.format = DatasetFormat::dense_csv;
      else if (f == "sparse-text")
        cfg.format = DatasetFormat::sparse_text;
      else
        throw ArgumentError("config: unknown format '" + f + "'");
    }
    if (!doc.contains("k")) throw ArgumentError("config: missing 'k'");
    cfg.k = doc.at("k").get<int>();
    if (doc.contains("p")) cfg.p = doc.at("p").get<int>();
    if (doc.contains("eps")) cfg.eps = doc.at("eps").get<double>();
    if (doc.contains("splits")) cfg.splits = doc.at("splits").get<int>();
    if (!doc.contains("n_l")) throw ArgumentError("config: missing 'n_l'");
    cfg.n_l = doc.at("n_l").get<int>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();

    if (doc.contains("algorithm")) {
      const auto& alg = doc.at("algorithm");
      if (alg.is_string()) {
        cfg.algorithm.name = alg.get<std::string>();
      } else {
        cfg.algorithm.name = alg.at("name").get<std::string>();
        if (alg.contains("C")) cfg.algorithm.c = alg.at("C").get<double>();
        if (alg.contains("mu")) cfg.algorithm.mu = alg.at("mu").get<double>();
        if (alg.contains("sigma2")) cfg.algorithm.sigma2 = alg.at("sigma2").get<double>();
        if (alg.contains("eps_k")) cfg.algorithm.eps_k = alg.at("eps_k").get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }

  const std::string& name = cfg.algorithm.name;
  if (name != "skl_kta" && name != "skl" && name != "rls_baseline" && name != "diffusion" &&
      name != "gaussian_field")
    throw ArgumentError("config: unknown algorithm '" + name + "'");
  if (cfg.k < 1) throw ArgumentError("config: k must be >= 1");
  if (cfg.p < 1) throw ArgumentError("config: p must be >= 1");
  if (cfg.eps <= 0.0) throw ArgumentError("config: eps must be positive");
  if (cfg.splits < 1) throw ArgumentError("config: splits must be >= 1");
  if (cfg.n_l < 1) throw ArgumentError("config: n_l must be >= 1");
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json doc;
  if (std::holds_alternative<std::string>(cfg.dataset)) {
    doc["dataset"] = std::get<std::string>(cfg.dataset);
  } else {
    const auto& gen = std::get<GeneratorSpec>(cfg.dataset);
    doc["dataset"] = {{"generator", gen.name}, {"seed", gen.seed}};
  }
  if (cfg.format)
    doc["format"] = *cfg.format == DatasetFormat::dense_csv ? "dense-csv" : "sparse-text";
  doc["k"] = cfg.k;
  doc["p"] = cfg.p;
  doc["eps"] = cfg.eps;
  doc["splits"] = cfg.splits;
  doc["n_l"] = cfg.n_l;
  doc["seed"] = cfg.seed;
  const auto& alg = cfg.algorithm;
  if (alg.name == "skl_kta") {
    doc["algorithm"] = alg.name;
  } else if (alg.name == "skl") {
    doc["algorithm"] = {{"name", alg.name}, {"C", alg.c}, {"mu", alg.mu}};
  } else if (alg.name == "rls_baseline") {
    doc["algorithm"] = {{"name", alg.name}, {"C", alg.c}};
  } else if (alg.name == "diffusion") {
    doc["algorithm"] = {{"name", alg.name}, {"sigma2", alg.sigma2}, {"C", alg.c}};
  } else {
    doc["algorithm"] = {{"name", alg.name}, {"eps_k", alg.eps_k}, {"C", alg.c}};
  }
  return doc;
}

namespace {

Dataset load_config_dataset(const ExperimentConfig& cfg) {
  if (std::holds_alternative<GeneratorSpec>(cfg.dataset))
    return gen_g50c(std::get<GeneratorSpec>(cfg.dataset).seed);
  const std::string& path = std::get<std::string>(cfg.dataset);
  DatasetFormat format;
  if (cfg.format) {
    format = *cfg.format;
  } else {
    format = path.size() >= 4 && path.substr(path.size() - 4) == ".csv"
                 ? DatasetFormat::dense_csv
                 : DatasetFormat::sparse_text;
  }
  return load_dataset(path, format);
}

struct SplitView {
  Dataset data;                 // labeled-prefix reordering of the base dataset
  std::vector<int> perm;        // perm[row] = base dataset row
  std::vector<int> query;      // rows n_l..n-1
};

SplitView build_split(const Dataset& base, const std::vector<int>& mask) {
  SplitView view;
  const int n = base.n();
  std::vector<char> is_labeled(n, 0);
  for (int idx : mask) is_labeled[idx] = 1;

  view.perm.reserve(n);
  for (int idx : mask) view.perm.push_back(idx);
  for (int i = 0; i < n; ++i)
    if (!is_labeled[i]) view.perm.push_back(i);

  Matrix features(n, base.dim());
  std::vector<int> labels(n, Dataset::kUnlabeled);
  for (int r = 0; r < n; ++r) {
    const int src = view.perm[r];
    for (int c = 0; c < base.dim(); ++c) features(r, c) = base.features(src, c);
    if (r < static_cast<int>(mask.size())) labels[r] = base.labels[src];
  }
  view.data = make_dataset(std::move(features), std::move(labels), base.class_count);
  // make_dataset keeps the order: labeled rows already form the prefix
  for (int r = static_cast<int>(mask.size()); r < n; ++r) view.query.push_back(r);
  return view;
}

std::shared_ptr<const EigenSystem> permute_rows(const EigenSystem& eig,
                                                const std::vector<int>& perm) {
  auto out = std::make_shared<EigenSystem>();
  out->gamma = eig.gamma;
  out->u = Matrix(eig.u.rows(), eig.u.cols());
  for (std::size_t r = 0; r < out->u.rows(); ++r) {
    const double* src = eig.u.row(static_cast<std::size_t>(perm[r]));
    double* dst = out->u.row(r);
    std::copy(src, src + out->u.cols(), dst);
  }
  return out;
}

std::vector<int> fit_and_predict(const ExperimentConfig& cfg, const SplitView& view,
                                 std::shared_ptr<const EigenSystem> eig, const Matrix* gauss_kernel,
                                 double* fit_s, double* predict_s) {
  const auto& alg = cfg.algorithm;
  std::vector<int> labels;
  if (alg.name == "rls_baseline") {
    // supervised baseline: Gaussian kernel on the raw features, one RLS solve
    // per label column
    const auto t0 = std::chrono::steady_clock::now();
    const int n_l = view.data.n_l;
    const LabelMatrix targets = LabelMatrix::from_labels(
        std::span<const int>(view.data.labels.data(), n_l), view.data.class_count);
    Matrix k_ll(n_l, n_l);
    for (int i = 0; i < n_l; ++i)
      for (int j = 0; j < n_l; ++j) k_ll(i, j) = (*gauss_kernel)(view.perm[i], view.perm[j]);
    std::vector<RlsSolution> sols;
    for (std::size_t col = 0; col < targets.y.cols(); ++col) {
      Vector y(n_l);
      for (int i = 0; i < n_l; ++i) y[i] = targets.y(i, col);
      sols.push_back(rls_solve(k_ll, y, alg.c));
    }
    *fit_s += seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const int n_u = static_cast<int>(view.query.size());
    Matrix k_ul(n_u, n_l);
    for (int r = 0; r < n_u; ++r)
      for (int j = 0; j < n_l; ++j)
        k_ul(r, j) = (*gauss_kernel)(view.perm[view.query[r]], view.perm[j]);
    Matrix values(n_u, sols.size());
    for (std::size_t col = 0; col < sols.size(); ++col) {
      const Vector f = rls_predict(k_ul, sols[col]);
      for (int r = 0; r < n_u; ++r) values(r, col) = f[r];
    }
    labels.resize(n_u);
    for (int r = 0; r < n_u; ++r) {
      if (targets.binary()) {
        labels[r] = values(r, 0) >= 0.0 ? 1 : 0;
      } else {
        std::size_t best = 0;
        for (std::size_t col = 1; col < values.cols(); ++col)
          if (values(r, col) > values(r, best)) best = col;
        labels[r] = static_cast<int>(best);
      }
    }
    *predict_s += seconds_since(t1);
    return labels;
  }

  const auto t0 = std::chrono::steady_clock::now();
  SklModel model;
  if (alg.name == "skl_kta")
    model = fit_skl_kta(view.data, std::move(eig), cfg.eps);
  else if (alg.name == "skl")
    model = fit_skl(view.data, std::move(eig), alg.c, alg.mu, cfg.eps);
  else if (alg.name == "diffusion")
    model = fit_parametric_transform(view.data, std::move(eig), TransformKind::diffusion,
                                     alg.sigma2, alg.c, cfg.eps);
  else
    model = fit_parametric_transform(view.data, std::move(eig), TransformKind::gaussian_field,
                                     alg.eps_k, alg.c, cfg.eps);
  *fit_s += seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  labels = predict(model, view.query).labels;
  *predict_s += seconds_since(t1);
  return labels;
}

}  // namespace

nlohmann::json Report::to_json() const {
  nlohmann::json doc;
  doc["config"] = config_echo;
  doc["dataset"] = {{"n", n}, {"d", d}, {"c", classes}, {"digest", digest}};
  doc["splits"] = nlohmann::json::array();
  for (std::size_t s = 0; s < splits.size(); ++s) {
    nlohmann::json row;
    row["split"] = s;
    if (splits[s].accuracy)
      row["accuracy"] = *splits[s].accuracy;
    else
      row["accuracy"] = nullptr;
    row["n_l"] = splits[s].n_l;
    row["n_u"] = splits[s].n_u;
    row["predicted"] = splits[s].predicted;
    doc["splits"].push_back(std::move(row));
  }
  doc["mean_accuracy"] = mean_accuracy ? nlohmann::json(*mean_accuracy) : nlohmann::json(nullptr);
  doc["std_accuracy"] = std_accuracy ? nlohmann::json(*std_accuracy) : nlohmann::json(nullptr);
  doc["timing"] = {{"graph_s", timing.graph_s},
                   {"eig_s", timing.eig_s},
                   {"fit_s", timing.fit_s},
                   {"predict_s", timing.predict_s}};
  return doc;
}

Report run_experiment(const ExperimentConfig& cfg) {
  Report report;
  report.config_echo = config_to_json(cfg);

  const Dataset base = load_config_dataset(cfg);
  report.n = base.n();
  report.d = base.dim();
  report.classes = base.class_count;
  report.digest = dataset_digest(base);
  if (cfg.k >= base.n()) throw ArgumentError("run_experiment: k must be below n");

  const auto masks = make_splits(base, cfg.n_l, cfg.splits, cfg.seed);

  const bool needs_spectral = cfg.algorithm.name != "rls_baseline";
  std::shared_ptr<const EigenSystem> eig_shared;
  Laplacian lap;
  Matrix gauss;
  if (needs_spectral) {
    const auto tg = std::chrono::steady_clock::now();
    const Graph g = gaussian_weights(knn_graph(base, cfg.k));
    lap = normalized_laplacian(g);
    report.timing.graph_s = seconds_since(tg);

    const auto te = std::chrono::steady_clock::now();
    auto eig = std::make_shared<EigenSystem>(eig_sym(lap.m));
    *eig = laplacian_power(*eig, cfg.p);
    report.timing.eig_s = seconds_since(te);
    eig_shared = std::move(eig);
  } else {
    const auto tg = std::chrono::steady_clock::now();
    gauss = gaussian_kernel(base.features);
    report.timing.graph_s = seconds_since(tg);
  }

  report.splits.resize(masks.size());
  std::vector<double> fit_times(masks.size(), 0.0), predict_times(masks.size(), 0.0);
  std::vector<std::exception_ptr> errors(masks.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(masks.size()); ++s) {
    try {
      const SplitView view = build_split(base, masks[s]);
      std::shared_ptr<const EigenSystem> eig;
      if (needs_spectral) {
        if (cfg.recompute_eig_per_split) {
          auto fresh = std::make_shared<EigenSystem>(eig_sym(lap.m));
          *fresh = laplacian_power(*fresh, cfg.p);
          eig = permute_rows(*fresh, view.perm);
        } else {
          eig = permute_rows(*eig_shared, view.perm);
        }
      }
      const std::vector<int> predicted = fit_and_predict(cfg, view, std::move(eig),
                                                         needs_spectral ? nullptr : &gauss,
                                                         &fit_times[s], &predict_times[s]);

      SplitResult& res = report.splits[s];
      res.n_l = cfg.n_l;
      res.n_u = static_cast<int>(view.query.size());
      res.predicted.assign(base.n(), Dataset::kUnlabeled);
      // visible labels pass through; predictions fill the rest, mapped back to
      // the original input order
      for (int r = 0; r < cfg.n_l; ++r)
        res.predicted[base.perm[view.perm[r]]] = view.data.labels[r];
      int correct = 0, scored = 0;
      for (std::size_t q = 0; q < view.query.size(); ++q) {
        const int base_row = view.perm[view.query[q]];
        res.predicted[base.perm[base_row]] = predicted[q];
        const int truth = base.labels[base_row];
        if (truth == Dataset::kUnlabeled) continue;
        ++scored;
        if (predicted[q] == truth) ++correct;
      }
      if (scored > 0) res.accuracy = static_cast<double>(correct) / scored;
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }

  for (std::size_t s = 0; s < masks.size(); ++s) {
    if (!errors[s]) continue;
    const std::string tag = "split " + std::to_string(s) + ": ";
    try {
      std::rethrow_exception(errors[s]);
    } catch (const DegenerateInstanceError& e) {
      throw DegenerateInstanceError(tag + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(tag + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(tag + e.what());
    } catch (const ArgumentError& e) {
      throw ArgumentError(tag + e.what());
    } catch (const std::exception& e) {
      throw Error(tag + e.what());
    }
  }

  for (std::size_t s = 0; s < masks.size(); ++s) {
    report.timing.fit_s += fit_times[s];
    report.timing.predict_s += predict_times[s];
  }

  std::vector<double> accs;
  for (const auto& sr : report.splits)
    if (sr.accuracy) accs.push_back(*sr.accuracy);
  if (!accs.empty()) {
    const double mean = std::accumulate(accs.begin(), accs.end(), 0.0) / accs.size();
    report.mean_accuracy = mean;
    if (accs.size() > 1) {
      double var = 0.0;
      for (double a : accs) var += (a - mean) * (a - mean);
      report.std_accuracy = std::sqrt(var / (accs.size() - 1));
    } else {
      report.std_accuracy = 0.0;
    }
  }
  return report;
}

void dump_spectrum(const ExperimentConfig& cfg, std::ostream& out) {
  const Dataset base = load_config_dataset(cfg);
  if (cfg.k >= base.n()) throw ArgumentError("dump_spectrum: k must be below n");
  const auto masks = make_splits(base, cfg.n_l, cfg.splits, cfg.seed);

  const Graph g = gaussian_weights(knn_graph(base, cfg.k));
  const Laplacian lap = normalized_laplacian(g);
  EigenSystem eig = laplacian_power(eig_sym(lap.m), cfg.p);

  const SplitView view = build_split(base, masks.front());
  const auto eig_split = permute_rows(eig, view.perm);
  const LabelMatrix targets = LabelMatrix::from_labels(
      std::span<const int>(view.data.labels.data(), view.data.n_l), view.data.class_count);
  const SpectralCoefficients co = spectral_coefficients(*eig_split, targets, cfg.eps);
  const Vector lb = lambda_bar(co);

  out << "i,gamma,a,lambda_bar\n";
  char buf[128];
  for (int i = 0; i < co.n; ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g\n", i, eig.gamma[i], co.a[i], lb[i]);
    out << buf;
  }
}

}  // namespace skl
