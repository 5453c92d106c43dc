#pragma once

#include <vector>

#include "rankad/common.hpp"
#include "rankad/knn.hpp"
#include "rankad/ranksvm.hpp"

namespace rankad {

/// Trained scorer plus the sorted training scores it is calibrated on.
struct Detector {
  RankModel model;
  /// g over the training set, ascending.
  std::vector<double> sorted_scores;
};

struct DetectionResult {
  double score = 0.0;
  /// Empirical rank of the score within the training scores, in [0, 1].
  double rank = 0.0;
  bool is_anomaly = false;
  double alpha = 0.0;
};

Detector build_detector(const RankModel& model, const NominalDataset& train);

/// Fraction of training scores <= the test score.
double test_rank(const Detector& det, std::span<const double> x);

/// Flags x when its score falls strictly below the ceil(alpha * n)-th
/// smallest training score. alpha = 0 never flags.
DetectionResult classify(const Detector& det, std::span<const double> x,
                         double alpha);
std::vector<DetectionResult> classify(const Detector& det, const Matrix& points,
                                      double alpha);

/// Index of the order statistic that separates the alpha tail, or -1 when
/// alpha = 0 (nothing is ever flagged).
std::ptrdiff_t alpha_order_index(double alpha, std::size_t n);

/// Scores test points with the average k-NN statistic against the training
/// set directly, no learned model. Shares the rank calibration scheme with
/// the detector above.
class AklpeBaseline {
 public:
  AklpeBaseline(NominalDataset train, std::size_t k);

  double score(std::span<const double> x) const;
  double rank(std::span<const double> x) const;
  DetectionResult classify(std::span<const double> x, double alpha) const;

  std::size_t k() const { return k_; }
  const std::vector<double>& sorted_scores() const { return sorted_scores_; }

 private:
  NominalDataset train_;
  std::size_t k_;
  std::vector<double> sorted_scores_;
};

/// One-shot rank of a test point under the baseline.
double aklpe_rank(const NominalDataset& train, std::size_t k,
                  std::span<const double> x);

}  // namespace rankad
