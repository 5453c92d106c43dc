#pragma once

#include <cstdint>
#include <vector>

#include "rankad/common.hpp"
#include "rankad/knn.hpp"
#include "rankad/pairs.hpp"
#include "rankad/ranksvm.hpp"

namespace rankad {

struct ParamGrid {
  std::vector<double> c_values;      // ascending, positive
  std::vector<double> sigma_values;  // ascending, positive
};

/// {0.001, 0.003, 0.01, ...}: a 1-3-10 ladder spanning six decades.
std::vector<double> default_c_grid();

/// Powers of two around a data-driven pivot: {2^i * pivot, i = -10..10}.
std::vector<double> default_sigma_grid(double pivot);

ParamGrid default_param_grid(double pivot);

/// Mean over the dataset of the average distance to the k nearest
/// neighbors (self excluded). Common pivot for the sigma grid.
double mean_knn_distance(const NominalDataset& data, std::size_t k);

/// Fraction of pairs whose ordering the scores get wrong; a tie counts as
/// wrong (the pair asked for a strict separation).
double disagreement(const std::vector<double>& scores,
                    const std::vector<PreferencePair>& pairs);

struct CvOptions {
  std::size_t k = kDefaultNeighbors;
  int m = kDefaultQuantizationLevels;
  std::size_t folds = 4;
  std::uint64_t seed = 0;
  std::size_t pair_cap = kDefaultPairCap;
  double tol = 1e-4;
  std::size_t max_epochs = 1000;
  unsigned threads = 1;
  /// Background probes drawn uniformly from the padded bounding box of the
  /// data. Probes whose neighbor statistic falls below every training
  /// point's must also score below the held-out points, and violations of
  /// that enter the fold metric at equal weight with the pair term. Zero
  /// keeps the plain held-out-pair objective. Held-out pairs alone cannot
  /// penalize a bandwidth so narrow that the scorer collapses to zero away
  /// from the data, which ruins detection even while in-sample orderings
  /// stay intact; the probes make that regime visible.
  std::size_t probes = 0;
};

struct CvCandidate {
  double c = 0.0;
  double sigma = 0.0;
  /// Validation disagreement per usable fold.
  std::vector<double> fold_disagreement;
  double mean_disagreement = 0.0;
  std::size_t folds_used = 0;
  bool converged_all = true;
};

struct CvReport {
  std::vector<CvCandidate> candidates;  // sigma-major, c-minor
  std::size_t chosen_index = 0;
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  std::vector<std::uint32_t> fold_of;  // per sample
  /// The full-data pair set the folds were carved from.
  PreferencePairSet pairs;
  std::size_t probes_total = 0;
  /// Probes below the training minimum of the neighbor statistic; only
  /// these contrast against held-out points.
  std::size_t probes_far = 0;

  const CvCandidate& chosen() const { return candidates[chosen_index]; }
};

/// Grid search over (C, sigma) by 4-fold (by default) cross-validation.
/// Levels and pairs come from the full dataset once; each fold trains on
/// the pairs fully outside it and validates the ordering of the pairs
/// fully inside it. Lowest mean disagreement wins; ties prefer smaller C,
/// then smaller sigma.
CvReport cv_select(const NominalDataset& data, const ParamGrid& grid,
                   const CvOptions& options);

}  // namespace rankad
