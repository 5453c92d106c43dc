#include "rankad/common.hpp"

#include <cmath>
#include <cstdint>

namespace rankad {

Matrix Matrix::take_rows(std::span<const std::uint32_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    auto src = row(indices[k]);
    auto dst = out.row(k);
    for (std::size_t j = 0; j < cols_; ++j) dst[j] = src[j];
  }
  return out;
}

NominalDataset::NominalDataset(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 2) {
    throw DataError("dataset needs at least 2 samples, got " +
                    std::to_string(points_.rows()));
  }
  if (points_.cols() < 1) {
    throw DataError("dataset needs at least 1 feature column");
  }
  for (std::size_t i = 0; i < points_.rows(); ++i) {
    for (double v : points_.row(i)) {
      if (!std::isfinite(v)) {
        throw DataError("non-finite value in dataset row " + std::to_string(i));
      }
    }
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    sum += diff * diff;
  }
  return sum;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rankad
