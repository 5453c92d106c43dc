#pragma once

#include <vector>

#include "rankad/common.hpp"

namespace rankad {

/// Negated average k-NN distances, one per training point. Every entry <= 0.
using ScoreVector = std::vector<double>;

/// Empirical ranks in (0, 1]; each value is a multiple of 1/n and the
/// maximum is exactly 1.
using RankVector = std::vector<double>;

/// Ranks quantized to {1, .., m}; nondecreasing in the rank.
struct QuantizedLevels {
  std::vector<int> levels;
  int m = 0;
};

inline constexpr std::size_t kDefaultNeighbors = 10;
inline constexpr int kDefaultQuantizationLevels = 3;

/// Full n x n Euclidean distance matrix: symmetric, zero diagonal.
Matrix pairwise_distances(const NominalDataset& data);

/// Score each point by the negated mean distance to its k nearest
/// neighbors among the other n-1 points (a point is not its own neighbor).
/// Requires 1 <= k <= n-1.
ScoreVector aknn_scores(const NominalDataset& data, std::size_t k);

/// r_i = |{ j : g_j <= g_i }| / n. Self is included, so r_i >= 1/n; tied
/// scores share the highest count.
RankVector ranks_from_scores(const ScoreVector& scores);

/// level_i = ceil(m * r_i) clamped to [1, m]: equal-width bins over (0, 1],
/// boundary values falling in the lower bin. Requires m >= 2.
QuantizedLevels quantize_ranks(const RankVector& ranks, int m);

}  // namespace rankad
