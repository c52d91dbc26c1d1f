#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skl/matrix.hpp"

namespace skl {

// Point set with a labeled prefix: rows 0..n_l-1 carry a class id in
// [0, class_count), the rest are unlabeled (-1). perm maps the stored row
// order back to the source order (perm[row] = original index).
struct Dataset {
  static constexpr int kUnlabeled = -1;

  Matrix features;          // n x d
  std::vector<int> labels;  // length n
  int n_l = 0;
  int class_count = 0;
  std::vector<int> perm;

  int n() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

enum class DatasetFormat { dense_csv, sparse_text };

// Reorders labeled points to the front (stable) and validates labels.
// class_count defaults to 1 + max label; pass it explicitly when some class
// may be missing from the visible labels.
Dataset make_dataset(Matrix features, std::vector<int> labels,
                     std::optional<int> class_count = std::nullopt);

// dense-csv: feature columns then a final label column (integer or "?").
// sparse-text: "<label> <index>:<value> ..." with 1-based indices, "?" label
// for unlabeled points.
Dataset load_dataset(const std::string& path, DatasetFormat format);

// Writes the dataset in dense-csv form, in its stored row order.
void save_dense_csv(const Dataset& data, const std::string& path);

}  // namespace skl
