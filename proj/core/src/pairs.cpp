#include "rankad/pairs.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace rankad {

PreferencePairSet generate_pairs(const QuantizedLevels& levels) {
  PreferencePairSet out;
  out.source_levels = levels;
  const std::size_t n = levels.levels.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (levels.levels[i] > levels.levels[j]) {
        out.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  }
  out.vacuous = out.pairs.empty();
  return out;
}

PreferencePairSet subsample_pairs(const PreferencePairSet& set, std::size_t cap,
                                  std::uint64_t seed) {
  if (cap < 1) throw UsageError("subsample_pairs: cap must be >= 1");
  if (set.size() <= cap) return set;

  // Strata are the ordered level pairs (level_higher, level_lower).
  std::map<std::pair<int, int>, std::vector<PreferencePair>> strata;
  const auto& levels = set.source_levels.levels;
  for (const auto& p : set.pairs) {
    strata[{levels[p.higher], levels[p.lower]}].push_back(p);
  }

  const double total = static_cast<double>(set.size());
  std::vector<std::pair<int, int>> keys;
  std::vector<std::size_t> take;
  std::vector<double> remainder;
  std::size_t assigned = 0;
  for (const auto& [key, bucket] : strata) {
    const double exact = static_cast<double>(bucket.size()) * static_cast<double>(cap) / total;
    const auto base = static_cast<std::size_t>(exact);
    keys.push_back(key);
    take.push_back(std::min(base, bucket.size()));
    remainder.push_back(exact - static_cast<double>(base));
    assigned += take.back();
  }
  // Largest-remainder rounding up to the cap, capacity permitting.
  while (assigned < cap) {
    std::size_t best = keys.size();
    for (std::size_t s = 0; s < keys.size(); ++s) {
      if (take[s] >= strata[keys[s]].size()) continue;
      if (best == keys.size() || remainder[s] > remainder[best]) best = s;
    }
    if (best == keys.size()) break;
    ++take[best];
    remainder[best] = -1.0;
    ++assigned;
  }

  std::mt19937_64 rng(seed);
  PreferencePairSet out;
  out.source_levels = set.source_levels;
  out.subsample_seed = seed;
  out.pairs.reserve(assigned);
  for (std::size_t s = 0; s < keys.size(); ++s) {
    auto& bucket = strata[keys[s]];
    // Partial Fisher-Yates: the first take[s] slots are a uniform sample.
    for (std::size_t t = 0; t < take[s] && t + 1 < bucket.size(); ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, bucket.size() - 1);
      std::swap(bucket[t], bucket[pick(rng)]);
    }
    out.pairs.insert(out.pairs.end(), bucket.begin(), bucket.begin() + take[s]);
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const PreferencePair& a, const PreferencePair& b) {
              return a.higher != b.higher ? a.higher < b.higher : a.lower < b.lower;
            });
  return out;
}

}  // namespace rankad
