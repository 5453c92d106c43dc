#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankad {

// Error categories aligned with the CLI exit codes:
// usage/config errors (1), data errors (2), numerical failures (3).
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
  using Error::Error;
};

class DataError : public Error {
  using Error::Error;
};

class NumericalError : public Error {
  using Error::Error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  const double* row_ptr(std::size_t i) const { return values_.data() + i * cols_; }
  double* row_ptr(std::size_t i) { return values_.data() + i * cols_; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// New matrix holding the listed rows, in the given order.
  Matrix take_rows(std::span<const std::uint32_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Nominal training sample. Validated on construction: n >= 2 rows,
/// d >= 1 columns, every entry finite. Row indices 0..n-1 identify the
/// samples in every downstream structure.
class NominalDataset {
 public:
  explicit NominalDataset(Matrix points);

  const Matrix& points() const { return points_; }
  std::size_t size() const { return points_.rows(); }
  std::size_t dim() const { return points_.cols(); }
  std::span<const double> row(std::size_t i) const { return points_.row(i); }

 private:
  Matrix points_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// SplitMix64 step; used to derive independent sub-seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace rankad
