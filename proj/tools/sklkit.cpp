#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "skl/checks.hpp"
#include "skl/dataset.hpp"
#include "skl/errors.hpp"
#include "skl/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgument = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDegenerate = 4;

skl::ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw skl::ArgumentError("cannot open config '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw skl::ArgumentError("config '" + path + "': " + e.what());
  }
  return skl::parse_config(doc);
}

int cmd_gen_g50c(std::uint64_t seed, const std::string& out_path) {
  const skl::Dataset data = skl::gen_g50c(seed);
  skl::save_dense_csv(data, out_path);
  std::cout << "wrote " << data.n() << " points (" << data.dim() << " features) to " << out_path
            << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_path) {
  const skl::ExperimentConfig config = read_config(config_path);
  const skl::Report report = skl::run_experiment(config);
  const std::string text = report.to_json().dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw skl::ArgumentError("cannot open output '" + out_path + "'");
    out << text;
  }
  return kExitOk;
}

int cmd_spectrum(const std::string& config_path) {
  const skl::ExperimentConfig config = read_config(config_path);
  skl::dump_spectrum(config, std::cout);
  return kExitOk;
}

int cmd_verify(std::uint64_t seed) {
  const auto results = skl::checks::run_all(seed);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral kernel learning toolkit"};
  app.require_subcommand(1);

  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-g50c", "generate the G50C benchmark dataset");
  gen->add_option("--seed", gen_seed, "generator seed")->default_val(0);
  gen->add_option("--out", gen_out, "output dense-csv path")->required();

  std::string run_config, run_out;
  auto* run = app.add_subcommand("run", "run a transductive experiment from a JSON config");
  run->add_option("--config", run_config, "config JSON path")->required();
  run->add_option("--out", run_out, "write the JSON report here instead of stdout");

  std::string spec_config;
  auto* spectrum = app.add_subcommand("spectrum", "dump per-eigenpair gamma/a/lambda_bar as CSV");
  spectrum->add_option("--config", spec_config, "config JSON path")->required();

  std::uint64_t verify_seed = 20240;
  auto* verify = app.add_subcommand("verify", "run the brute-force oracle suite");
  verify->add_option("--seed", verify_seed, "verification seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgument;
  }

  try {
    if (gen->parsed()) return cmd_gen_g50c(gen_seed, gen_out);
    if (run->parsed()) return cmd_run(run_config, run_out);
    if (spectrum->parsed()) return cmd_spectrum(spec_config);
    if (verify->parsed()) return cmd_verify(verify_seed);
  } catch (const skl::DegenerateInstanceError& e) {
    std::cerr << "degenerate instance: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const skl::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const skl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
