#pragma once

#include "rankad/common.hpp"

namespace rankad {

/// RBF kernel k(x, y) = exp(-|x - y|^2 / sigma^2).
struct KernelSpec {
  double sigma = 1.0;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// Dense Gram matrix over the rows of `points`.
Matrix gram_matrix(const Matrix& points, const KernelSpec& spec);

/// Elementwise exp(-sq/sigma^2); `sq` holds squared distances.
Matrix gram_from_squared_distances(const Matrix& sq, const KernelSpec& spec);

}  // namespace rankad
