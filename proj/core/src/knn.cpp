#include "rankad/knn.hpp"

#include <algorithm>
#include <cmath>

namespace rankad {

Matrix pairwise_distances(const NominalDataset& data) {
  const std::size_t n = data.size();
  Matrix dist(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclidean_distance(data.row(i), data.row(j));
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

ScoreVector aknn_scores(const NominalDataset& data, std::size_t k) {
  const std::size_t n = data.size();
  if (k < 1 || k >= n) {
    throw UsageError("aknn_scores: k must satisfy 1 <= k <= n-1, got k=" +
                     std::to_string(k) + " with n=" + std::to_string(n));
  }
  ScoreVector scores(n);
  std::vector<double> dists(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dists[m++] = euclidean_distance(data.row(i), data.row(j));
    }
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    double sum = 0.0;
    for (std::size_t t = 0; t < k; ++t) sum += dists[t];
    // nth_element leaves the k smallest in the first k slots
    scores[i] = -sum / static_cast<double>(k);
  }
  return scores;
}

RankVector ranks_from_scores(const ScoreVector& scores) {
  const std::size_t n = scores.size();
  std::vector<double> sorted(scores);
  std::sort(sorted.begin(), sorted.end());
  RankVector ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto count =
        std::upper_bound(sorted.begin(), sorted.end(), scores[i]) - sorted.begin();
    ranks[i] = static_cast<double>(count) / static_cast<double>(n);
  }
  return ranks;
}

QuantizedLevels quantize_ranks(const RankVector& ranks, int m) {
  if (m < 2) {
    throw UsageError("quantize_ranks: m must be >= 2, got " + std::to_string(m));
  }
  QuantizedLevels out;
  out.m = m;
  out.levels.resize(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    // Guard: m*r computed on exact bin boundaries (r = k/m) may round one
    // ulp above the integer, which would push the value into the upper bin.
    // Rank gaps are >= 1/n >> 1e-9, so the shift cannot cross a real bin.
    const int level =
        static_cast<int>(std::ceil(static_cast<double>(m) * ranks[i] - 1e-9));
    out.levels[i] = std::clamp(level, 1, m);
  }
  return out;
}

}  // namespace rankad
