#include "rankad/detector.hpp"

#include <algorithm>
#include <cmath>

namespace rankad {

namespace {

double rank_in(const std::vector<double>& sorted, double score) {
  const auto at_most = std::upper_bound(sorted.begin(), sorted.end(), score) -
                       sorted.begin();
  return static_cast<double>(at_most) / static_cast<double>(sorted.size());
}

DetectionResult classify_score(const std::vector<double>& sorted, double score,
                               double alpha) {
  DetectionResult res;
  res.score = score;
  res.rank = rank_in(sorted, score);
  res.alpha = alpha;
  const std::ptrdiff_t idx = alpha_order_index(alpha, sorted.size());
  res.is_anomaly = idx >= 0 && score < sorted[static_cast<std::size_t>(idx)];
  return res;
}

}  // namespace

Detector build_detector(const RankModel& model, const NominalDataset& train) {
  Detector det;
  det.model = model;
  det.sorted_scores = decision_function(model, train.points());
  std::sort(det.sorted_scores.begin(), det.sorted_scores.end());
  return det;
}

double test_rank(const Detector& det, std::span<const double> x) {
  return rank_in(det.sorted_scores, decision_function(det.model, x));
}

std::ptrdiff_t alpha_order_index(double alpha, std::size_t n) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw UsageError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (alpha == 0.0) return -1;
  // ceil(alpha * n) as the 1-based order statistic; the small shift keeps
  // exact multiples (0.2 * 10 and friends) from rounding up a whole step.
  const double raw = std::ceil(alpha * static_cast<double>(n) - 1e-9);
  const auto level = static_cast<std::ptrdiff_t>(raw);
  return std::clamp<std::ptrdiff_t>(level, 1,
                                    static_cast<std::ptrdiff_t>(n)) - 1;
}

DetectionResult classify(const Detector& det, std::span<const double> x,
                         double alpha) {
  return classify_score(det.sorted_scores, decision_function(det.model, x),
                        alpha);
}

std::vector<DetectionResult> classify(const Detector& det, const Matrix& points,
                                      double alpha) {
  std::vector<DetectionResult> out;
  out.reserve(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out.push_back(classify(det, points.row(i), alpha));
  }
  return out;
}

AklpeBaseline::AklpeBaseline(NominalDataset train, std::size_t k)
    : train_(std::move(train)), k_(k) {
  sorted_scores_ = aknn_scores(train_, k_);  // validates k against n - 1
  std::sort(sorted_scores_.begin(), sorted_scores_.end());
}

double AklpeBaseline::score(std::span<const double> x) const {
  if (x.size() != train_.dim()) {
    throw UsageError("point has dimension " + std::to_string(x.size()) +
                     " but the training data has " +
                     std::to_string(train_.dim()));
  }
  std::vector<double> dist(train_.size());
  for (std::size_t i = 0; i < train_.size(); ++i) {
    dist[i] = euclidean_distance(train_.row(i), x);
  }
  std::nth_element(dist.begin(), dist.begin() + (k_ - 1), dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k_; ++i) sum += dist[i];
  return -sum / static_cast<double>(k_);
}

double AklpeBaseline::rank(std::span<const double> x) const {
  return rank_in(sorted_scores_, score(x));
}

DetectionResult AklpeBaseline::classify(std::span<const double> x,
                                        double alpha) const {
  return classify_score(sorted_scores_, score(x), alpha);
}

double aklpe_rank(const NominalDataset& train, std::size_t k,
                  std::span<const double> x) {
  return AklpeBaseline(train, k).rank(x);
}

}  // namespace rankad
