#include "skl/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "skl/errors.hpp"
#include "skl/linalg.hpp"

namespace skl {

namespace {

static_assert(std::endian::native == std::endian::little,
              "model sidecar assumes a little-endian host");

std::string kind_name(FitKind k) {
  switch (k) {
    case FitKind::skl_kta: return "parameter_free";
    case FitKind::skl: return "parametric";
    case FitKind::diffusion: return "diffusion";
    case FitKind::gaussian_field: return "gaussian_field";
  }
  return "parameter_free";
}

FitKind kind_from_name(const std::string& s) {
  if (s == "parameter_free") return FitKind::skl_kta;
  if (s == "parametric") return FitKind::skl;
  if (s == "diffusion") return FitKind::diffusion;
  if (s == "gaussian_field") return FitKind::gaussian_field;
  throw ParseError("load_model: unknown mode kind '" + s + "'");
}

std::string sidecar_path(const std::string& path) { return path + ".u"; }

}  // namespace

void save_model(const SklModel& model, const std::string& path) {
  nlohmann::json mode;
  mode["kind"] = kind_name(model.kind);
  if (model.c) mode["C"] = *model.c;
  if (model.mu) mode["mu"] = *model.mu;
  if (model.transform_param) mode["param"] = *model.transform_param;

  std::vector<int> labels_l(model.n_l());
  for (int i = 0; i < model.n_l(); ++i) {
    if (model.y_l.binary()) {
      labels_l[i] = model.y_l.y(i, 0) > 0.0 ? 1 : 0;
    } else {
      int cls = 0;
      for (int k = 0; k < model.y_l.classes; ++k)
        if (model.y_l.y(i, k) == 1.0) cls = k;
      labels_l[i] = cls;
    }
  }

  nlohmann::json doc;
  doc["n"] = model.n();
  doc["n_l"] = model.n_l();
  doc["c"] = model.y_l.classes;
  doc["spectrum"] = model.spectrum;
  doc["mode"] = mode;
  doc["eps"] = model.eps;
  doc["dataset_digest"] = model.dataset_digest;
  doc["labels_l"] = labels_l;
  doc["gamma"] = model.eig->gamma;

  std::ofstream out(path);
  if (!out) throw ArgumentError("save_model: cannot open '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw ArgumentError("save_model: write failed for '" + path + "'");

  std::ofstream bin(sidecar_path(path), std::ios::binary);
  if (!bin) throw ArgumentError("save_model: cannot open '" + sidecar_path(path) + "'");
  bin.write(reinterpret_cast<const char*>(model.eig->u.data()),
            static_cast<std::streamsize>(model.eig->u.size() * sizeof(double)));
  if (!bin) throw ArgumentError("save_model: sidecar write failed");
}

SklModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_model: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("load_model: ") + e.what());
  }

  SklModel model;
  try {
    const int n = doc.at("n").get<int>();
    const int n_l = doc.at("n_l").get<int>();
    const int classes = doc.at("c").get<int>();
    model.spectrum = doc.at("spectrum").get<Vector>();
    model.eps = doc.at("eps").get<double>();
    model.dataset_digest = doc.at("dataset_digest").get<std::string>();
    const auto labels_l = doc.at("labels_l").get<std::vector<int>>();
    Vector gamma = doc.at("gamma").get<Vector>();
    const auto& mode = doc.at("mode");
    model.kind = kind_from_name(mode.at("kind").get<std::string>());
    if (mode.contains("C")) model.c = mode.at("C").get<double>();
    if (mode.contains("mu")) model.mu = mode.at("mu").get<double>();
    if (mode.contains("param")) model.transform_param = mode.at("param").get<double>();

    if (n < 1 || n_l < 1 || n_l > n) throw ParseError("load_model: bad sizes");
    if (static_cast<int>(model.spectrum.size()) != n || static_cast<int>(gamma.size()) != n)
      throw ParseError("load_model: spectrum/gamma length mismatch");
    if (static_cast<int>(labels_l.size()) != n_l)
      throw ParseError("load_model: labels_l length mismatch");

    auto eig = std::make_shared<EigenSystem>();
    eig->gamma = std::move(gamma);
    eig->u = Matrix(n, n);
    std::ifstream bin(sidecar_path(path), std::ios::binary);
    if (!bin) throw ArgumentError("load_model: cannot open '" + sidecar_path(path) + "'");
    bin.read(reinterpret_cast<char*>(eig->u.data()),
             static_cast<std::streamsize>(eig->u.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(eig->u.size() * sizeof(double)))
      throw ParseError("load_model: sidecar truncated");
    model.eig = std::move(eig);

    model.y_l = LabelMatrix::from_labels(labels_l, classes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("load_model: ") + e.what());
  }

  // Rebuild the decision coefficients; the labeled-block solve is part of
  // prediction setup, not spectrum learning.
  std::vector<int> labeled(model.n_l());
  for (int i = 0; i < model.n_l(); ++i) labeled[i] = i;
  Matrix g_ll = kernels::weighted_gram(model.eig->u, model.spectrum, labeled, labeled);
  if (!model.parameter_free()) {
    if (!model.c) throw ParseError("load_model: parametric mode without C");
    for (int i = 0; i < model.n_l(); ++i) g_ll(i, i) += 1.0 / *model.c;
  }
  model.alpha = spd_solve_checked(g_ll, model.y_l.y);
  return model;
}

}  // namespace skl
