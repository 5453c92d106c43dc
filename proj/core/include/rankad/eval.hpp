#pragma once

#include <functional>
#include <vector>

#include "rankad/common.hpp"
#include "rankad/detector.hpp"

namespace rankad {

/// Operating points of the rule "flag x when score(x) < threshold", one per
/// distinct score cutoff. Cutoffs ascend along the curve, so (fpr, tpr) runs
/// from (0, 0) to (1, 1); the final cutoff is +infinity (flag everything).
struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> fpr;
  std::vector<double> tpr;
};

struct RocResult {
  RocCurve curve;
  /// P(nominal score > anomaly score), ties counting one half.
  double auc = 0.0;
};

/// Lower score = more anomalous. Exact Mann-Whitney counting; no
/// approximation beyond the final division.
RocResult roc_auc(const std::vector<double>& nominal_scores,
                  const std::vector<double>& anomaly_scores);

/// Fraction of a fresh nominal sample flagged at level alpha.
double empirical_false_alarm(const Detector& det, const NominalDataset& fresh,
                             double alpha);

struct BoundingBox {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
};

/// Scores evaluated at the centers of an nx-by-ny grid of equal cells.
/// values[iy * nx + ix] with x ascending in ix and y ascending in iy;
/// a 1x1 grid is the single bbox center.
struct LevelGrid {
  BoundingBox bbox;
  std::size_t nx = 0, ny = 0;
  std::vector<double> xs;  // cell-center x coordinates
  std::vector<double> ys;
  std::vector<double> values;
};

using PlanarScorer = std::function<double(std::span<const double>)>;

LevelGrid level_grid(const PlanarScorer& scorer, const BoundingBox& bbox,
                     std::size_t nx, std::size_t ny);
/// Same grid over a trained scorer; the model must be 2-D.
LevelGrid level_grid(const RankModel& model, const BoundingBox& bbox,
                     std::size_t nx, std::size_t ny);

struct LatencyReport {
  /// Per-repeat mean microseconds per point.
  std::vector<double> detector_us;
  std::vector<double> aklpe_us;
  double detector_median_us = 0.0;
  double aklpe_median_us = 0.0;
  std::size_t support_points = 0;
  std::size_t support_pairs = 0;
  std::size_t n_train = 0;
  std::size_t k = 0;
  std::size_t test_points = 0;
  std::size_t repeats = 0;
};

/// Times detector classification against scoring with the k-NN statistic
/// over the full training set, on the same points. Both run single
/// threaded; one untimed warmup pass precedes the measured repeats.
LatencyReport latency_benchmark(const Detector& det,
                                const NominalDataset& baseline_data,
                                std::size_t k, const Matrix& test_points,
                                std::size_t repeats);

}  // namespace rankad
