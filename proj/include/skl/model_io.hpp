#pragma once

#include <string>

#include "skl/skl.hpp"

namespace skl {

// Persists a fitted model as <path> (JSON: n, n_l, c, spectrum, mode, eps,
// dataset_digest, labels_l, gamma) plus a binary sidecar <path>.u holding U
// row-major as little-endian 64-bit floats. Enough to reload and predict
// without refitting.
void save_model(const SklModel& model, const std::string& path);

SklModel load_model(const std::string& path);

}  // namespace skl
