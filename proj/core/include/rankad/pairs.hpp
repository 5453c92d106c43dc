#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rankad/knn.hpp"

namespace rankad {

/// Ordered preference: the sample at `higher` sits at a strictly higher
/// quantized level than the one at `lower`.
struct PreferencePair {
  std::uint32_t higher = 0;
  std::uint32_t lower = 0;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

struct PreferencePairSet {
  std::vector<PreferencePair> pairs;
  QuantizedLevels source_levels;
  std::optional<std::uint64_t> subsample_seed;
  /// Set when every sample sat at the same level, so no pair could be formed.
  bool vacuous = false;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

inline constexpr std::size_t kDefaultPairCap = 200000;

/// All (i, j) with level_i > level_j, enumerated i-major, j-minor.
PreferencePairSet generate_pairs(const QuantizedLevels& levels);

/// Identity when |pairs| <= cap; otherwise a seeded uniform subset of size
/// cap, allocated proportionally across the ordered level-pair strata so no
/// stratum is starved.
PreferencePairSet subsample_pairs(const PreferencePairSet& set, std::size_t cap,
                                  std::uint64_t seed);

}  // namespace rankad
