#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankad/common.hpp"
#include "rankad/detector.hpp"
#include "rankad/knn.hpp"
#include "rankad/pairs.hpp"

namespace rankad {

struct LoadedDataset {
  Matrix features;
  /// One 0/1 entry per row when loaded with labels, otherwise empty.
  std::vector<int> labels;
};

/// Headerless numeric CSV, one sample per row. With `has_labels` the last
/// column must be exactly 0 (nominal) or 1 (anomaly). Throws DataError with
/// 1-based row/column coordinates on ragged, non-numeric, or non-finite
/// cells.
LoadedDataset load_dataset(const std::string& path, bool has_labels);

void save_dataset_csv(const std::string& path, const Matrix& features,
                      const std::vector<int>* labels = nullptr);

/// Detector plus the training recipe that produced it; everything needed to
/// reproduce or audit a run.
struct ModelBundle {
  Detector detector;
  std::size_t k = kDefaultNeighbors;
  int m = kDefaultQuantizationLevels;
  std::size_t pair_cap = kDefaultPairCap;
  std::uint64_t pair_seed = 0;
};

inline constexpr int kModelFormatVersion = 1;

/// JSON model file: format tag, version, payload, and an FNV-1a checksum of
/// the payload text. Numbers round-trip bitwise, so a reloaded model scores
/// and classifies identically.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace rankad
