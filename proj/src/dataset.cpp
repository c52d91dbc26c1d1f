#include "skl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "skl/errors.hpp"

namespace skl {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line_no << ": " << what;
  throw ParseError(msg.str());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view tok, int& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// label token: non-negative integer class id, or "?" for unlabeled
int parse_label(std::string_view tok, const std::string& path, std::size_t line_no) {
  if (tok == "?") return Dataset::kUnlabeled;
  int v = 0;
  if (!parse_int(tok, v) || v < 0) parse_fail(path, line_no, "bad label '" + std::string(tok) + "'");
  return v;
}

struct ParsedRows {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t dim = 0;
};

ParsedRows read_dense_csv(std::istream& in, const std::string& path) {
  ParsedRows out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty()) continue;
    std::vector<std::string_view> toks;
    std::size_t start = 0;
    while (start <= body.size()) {
      const std::size_t comma = body.find(',', start);
      const std::size_t end = comma == std::string_view::npos ? body.size() : comma;
      toks.push_back(trim(body.substr(start, end - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (toks.size() < 2) parse_fail(path, line_no, "need at least one feature and a label");
    if (out.dim == 0)
      out.dim = toks.size() - 1;
    else if (toks.size() - 1 != out.dim)
      parse_fail(path, line_no, "expected " + std::to_string(out.dim + 1) + " columns");
    std::vector<double> row(out.dim);
    for (std::size_t c = 0; c < out.dim; ++c)
      if (!parse_double(toks[c], row[c]))
        parse_fail(path, line_no, "bad number '" + std::string(toks[c]) + "'");
    out.labels.push_back(parse_label(toks.back(), path, line_no));
    out.rows.push_back(std::move(row));
  }
  return out;
}

ParsedRows read_sparse_text(std::istream& in, const std::string& path) {
  struct SparseRow {
    std::vector<std::pair<int, double>> entries;  // 0-based column, value
  };
  std::vector<SparseRow> rows;
  std::vector<int> labels;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls{line};
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    labels.push_back(parse_label(tok, path, line_no));
    SparseRow row;
    while (ls >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos) parse_fail(path, line_no, "bad entry '" + tok + "'");
      int idx = 0;
      double val = 0.0;
      if (!parse_int(std::string_view(tok).substr(0, colon), idx) || idx < 1)
        parse_fail(path, line_no, "bad index in '" + tok + "'");
      if (!parse_double(std::string_view(tok).substr(colon + 1), val))
        parse_fail(path, line_no, "bad value in '" + tok + "'");
      row.entries.emplace_back(idx - 1, val);
      dim = std::max(dim, static_cast<std::size_t>(idx));
    }
    rows.push_back(std::move(row));
  }
  ParsedRows out;
  out.dim = dim;
  out.labels = std::move(labels);
  out.rows.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<double> dense(dim, 0.0);
    for (const auto& [c, v] : r.entries) dense[static_cast<std::size_t>(c)] = v;
    out.rows.push_back(std::move(dense));
  }
  return out;
}

}  // namespace

Dataset make_dataset(Matrix features, std::vector<int> labels, std::optional<int> class_count) {
  const std::size_t n = features.rows();
  if (labels.size() != n) throw ArgumentError("make_dataset: label count does not match rows");
  for (std::size_t i = 0; i < features.size(); ++i)
    if (!std::isfinite(features.data()[i]))
      throw ValidationError("make_dataset: non-finite feature value");

  int max_label = -1;
  std::size_t n_l = 0;
  for (int y : labels) {
    if (y == Dataset::kUnlabeled) continue;
    if (y < 0) throw ArgumentError("make_dataset: negative class id");
    max_label = std::max(max_label, y);
    ++n_l;
  }
  if (n_l == 0) throw ValidationError("make_dataset: no labeled points");
  const int c = class_count.value_or(max_label + 1);
  if (max_label >= c) throw ArgumentError("make_dataset: label exceeds class_count");

  Dataset out;
  out.n_l = static_cast<int>(n_l);
  out.class_count = c;
  out.perm.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] != Dataset::kUnlabeled) out.perm.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] == Dataset::kUnlabeled) out.perm.push_back(static_cast<int>(i));

  out.features = Matrix(n, features.cols());
  out.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = static_cast<std::size_t>(out.perm[r]);
    out.labels[r] = labels[src];
    for (std::size_t k = 0; k < features.cols(); ++k) out.features(r, k) = features(src, k);
  }
  return out;
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_dataset: cannot open '" + path + "'");
  ParsedRows parsed =
      format == DatasetFormat::dense_csv ? read_dense_csv(in, path) : read_sparse_text(in, path);
  if (parsed.rows.empty()) throw ValidationError("load_dataset: empty dataset in '" + path + "'");

  Matrix features(parsed.rows.size(), parsed.dim);
  for (std::size_t r = 0; r < parsed.rows.size(); ++r)
    for (std::size_t c = 0; c < parsed.dim; ++c) features(r, c) = parsed.rows[r][c];
  return make_dataset(std::move(features), std::move(parsed.labels));
}

void save_dense_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("save_dense_csv: cannot open '" + path + "' for writing");
  char buf[40];
  for (int r = 0; r < data.n(); ++r) {
    for (int c = 0; c < data.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.features(r, c));
      out << buf << ',';
    }
    if (data.labels[r] == Dataset::kUnlabeled)
      out << "?\n";
    else
      out << data.labels[r] << '\n';
  }
  if (!out) throw ArgumentError("save_dense_csv: write failed for '" + path + "'");
}

}  // namespace skl
