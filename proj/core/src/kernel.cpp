#include "rankad/kernel.hpp"

#include <cmath>
#include <string>

namespace rankad {

namespace {

void check_sigma(const KernelSpec& spec) {
  if (!(spec.sigma > 0.0)) {
    throw UsageError("kernel: sigma must be positive, got " + std::to_string(spec.sigma));
  }
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  check_sigma(spec);
  if (x.size() != y.size()) {
    throw UsageError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  return std::exp(-squared_distance(x, y) / (spec.sigma * spec.sigma));
}

Matrix gram_matrix(const Matrix& points, const KernelSpec& spec) {
  check_sigma(spec);
  const std::size_t n = points.rows();
  const double inv = 1.0 / (spec.sigma * spec.sigma);
  Matrix gram(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = std::exp(-squared_distance(points.row(i), points.row(j)) * inv);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  return gram;
}

Matrix gram_from_squared_distances(const Matrix& sq, const KernelSpec& spec) {
  check_sigma(spec);
  const double inv = 1.0 / (spec.sigma * spec.sigma);
  Matrix gram(sq.rows(), sq.cols());
  const auto& src = sq.values();
  auto& dst = gram.values();
  for (std::size_t t = 0; t < src.size(); ++t) dst[t] = std::exp(-src[t] * inv);
  return gram;
}

}  // namespace rankad
