// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. argv[1] (optional) is the CLI binary used by the
// determinism criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skl/checks.hpp"
#include "skl/rng.hpp"
#include "skl/errors.hpp"
#include "skl/experiment.hpp"
#include "skl/graph.hpp"
#include "skl/skl.hpp"

namespace {

int failures = 0;

void line(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

void criterion_1_g50c() {
  const auto t0 = std::chrono::steady_clock::now();
  skl::ExperimentConfig cfg;
  cfg.dataset = skl::GeneratorSpec{"g50c", 42};
  cfg.k = 50;
  cfg.p = 5;
  cfg.eps = 1e-6;
  cfg.algorithm.name = "skl_kta";
  cfg.splits = 10;
  cfg.n_l = 50;
  cfg.seed = 7;
  const skl::Report report = skl::run_experiment(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double mean = report.mean_accuracy.value_or(0.0);
  const double std_dev = report.std_accuracy.value_or(1.0);
  const bool pass = mean >= 0.90 && std_dev <= 0.03 && wall <= 60.0;
  line(1, pass, "G50C replica (k=50, p=5, n_l=50, 10 splits)",
       "mean=" + fmt(mean) + " std=" + fmt(std_dev) + " wall=" + fmt(wall) + "s");
}

void run_check(int criterion, const std::string& what, skl::checks::CheckResult (*fn)(std::uint64_t),
               std::uint64_t seed, double budget_s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = fn(seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_budget = budget_s <= 0.0 || wall <= budget_s;
  line(criterion, res.pass && in_budget, what,
       res.detail + (budget_s > 0.0 ? " wall=" + fmt(wall) + "s" : ""));
}

void criterion_9_sanity() {
  skl::Rng rng(2024);
  bool pass = true;
  std::string detail;

  for (int classes : {2, 3}) {
    const int per = 20;
    const int n = per * classes;
    const double radius = classes == 2 ? 5.0 : 10.0;
    skl::Matrix x(n, 2);
    std::vector<int> labels(n, skl::Dataset::kUnlabeled);
    std::vector<int> blob_of(n);
    for (int b = 0; b < classes; ++b) {
      const double angle = 6.283185307179586 * b / classes;
      for (int i = 0; i < per; ++i) {
        const int row = b * per + i;
        x(row, 0) = radius * std::cos(angle) + 0.5 * rng.normal();
        x(row, 1) = radius * std::sin(angle) + 0.5 * rng.normal();
        blob_of[row] = b;
      }
    }
    // one labeled point per class through the split machinery
    std::vector<int> full = labels;
    for (int r = 0; r < n; ++r) full[r] = blob_of[r];
    const skl::Dataset data = skl::make_dataset(x, full, classes);

    skl::ExperimentConfig cfg;
    cfg.k = 5;
    cfg.p = 2;
    cfg.eps = 1e-6;
    cfg.algorithm.name = "skl_kta";
    cfg.splits = 1;
    cfg.n_l = classes;
    cfg.seed = 11;

    const auto masks = skl::make_splits(data, classes, 1, cfg.seed);
    std::vector<int> visible(n, skl::Dataset::kUnlabeled);
    for (int idx : masks[0]) visible[idx] = data.labels[idx];
    const skl::Dataset split = skl::make_dataset(data.features, visible, classes);
    const auto g = skl::gaussian_weights(skl::knn_graph(split, cfg.k));
    auto eig = std::make_shared<skl::EigenSystem>(skl::eig_sym(skl::normalized_laplacian(g).m));
    *eig = skl::laplacian_power(*eig, cfg.p);
    const skl::SklModel model = skl::fit_skl_kta(split, eig, cfg.eps);
    std::vector<int> query;
    for (int i = classes; i < n; ++i) query.push_back(i);
    const skl::Prediction pred = skl::predict(model, query);
    int correct = 0;
    for (std::size_t q = 0; q < query.size(); ++q) {
      const int truth = data.labels[split.perm[query[q]]];
      if (pred.labels[q] == truth) ++correct;
    }
    const double acc = static_cast<double>(correct) / query.size();
    pass = pass && acc == 1.0;
    detail += (classes == 2 ? "binary=" : " multiclass=") + fmt(acc);
  }
  line(9, pass, "separable blobs reach perfect transductive accuracy", detail);
}

void criterion_10_determinism(const char* cli) {
  if (cli == nullptr) {
    line(10, false, "CLI determinism", "no CLI binary path given");
    return;
  }
  const std::string config_path = "/tmp/sklkit_acceptance_config.json";
  {
    std::ofstream out(config_path);
    out << R"({"dataset": {"generator": "g50c", "seed": 6}, "k": 12, "p": 2,
               "algorithm": "skl_kta", "splits": 3, "n_l": 25, "seed": 9})";
  }
  auto run_once = [&](const std::string& out_path) {
    const std::string cmd =
        std::string(cli) + " run --config " + config_path + " --out " + out_path;
    return std::system(cmd.c_str());
  };
  const int rc1 = run_once("/tmp/sklkit_acceptance_r1.json");
  const int rc2 = run_once("/tmp/sklkit_acceptance_r2.json");
  bool pass = rc1 == 0 && rc2 == 0;
  std::string detail = "exit codes " + std::to_string(rc1) + "," + std::to_string(rc2);
  if (pass) {
    auto read = [](const std::string& p) {
      std::ifstream in(p);
      nlohmann::json doc;
      in >> doc;
      return doc;
    };
    auto a = read("/tmp/sklkit_acceptance_r1.json");
    auto b = read("/tmp/sklkit_acceptance_r2.json");
    a.erase("timing");
    b.erase("timing");
    pass = a.dump() == b.dump();
    detail += pass ? ", reports identical modulo timing" : ", reports differ";
  }
  line(10, pass, "identical seeds give identical reports", detail);
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  std::printf("acceptance suite\n");

  criterion_1_g50c();
  run_check(2, "closed-form spectrum equals the numeric minimizer",
            skl::checks::spectrum_closed_form, 1001, 5.0);
  run_check(3, "closed-form mu* maximizes the alignment grid", skl::checks::alignment_closed_form,
            1002, 10.0);
  run_check(4, "decision values are independent of C and mu",
            skl::checks::parameter_independence, 1003, 0.0);
  run_check(5, "zero-padded labels upper-bound the labeled block",
            skl::checks::zero_padding_upper_bound, 1004, 0.0);
  run_check(6, "manifold regularizer identity", skl::checks::regularizer_identity, 1005,
            0.0);
  run_check(7, "eigendecomposition contract", skl::checks::eigen_contract, 1006, 0.0);
  run_check(8, "RLS duality and gradient", skl::checks::rls_duality, 1007, 0.0);
  criterion_9_sanity();
  criterion_10_determinism(cli);

  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
