#include "rankad/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace rankad {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RocResult roc_auc(const std::vector<double>& nominal_scores,
                  const std::vector<double>& anomaly_scores) {
  if (nominal_scores.empty() || anomaly_scores.empty()) {
    throw UsageError("roc_auc needs at least one score in each class");
  }
  std::vector<double> nom = nominal_scores;
  std::vector<double> ano = anomaly_scores;
  std::sort(nom.begin(), nom.end());
  std::sort(ano.begin(), ano.end());

  // Integer pair counting keeps the result exact: a nominal point beats an
  // anomaly when it scores strictly higher, ties are worth one half.
  unsigned long long wins = 0, ties = 0;
  for (double s : nom) {
    const auto lo = std::lower_bound(ano.begin(), ano.end(), s);
    const auto hi = std::upper_bound(lo, ano.end(), s);
    wins += static_cast<unsigned long long>(lo - ano.begin());
    ties += static_cast<unsigned long long>(hi - lo);
  }
  const unsigned long long total =
      static_cast<unsigned long long>(nom.size()) *
      static_cast<unsigned long long>(ano.size());

  RocResult res;
  res.auc = static_cast<double>(2 * wins + ties) /
            static_cast<double>(2 * total);

  // One operating point per distinct score value: flagging "score < v"
  // sweeps the curve from (0,0) up to (1,1) at v = +inf.
  std::vector<double> cuts;
  cuts.reserve(nom.size() + ano.size() + 1);
  std::merge(nom.begin(), nom.end(), ano.begin(), ano.end(),
             std::back_inserter(cuts));
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(std::numeric_limits<double>::infinity());

  RocCurve& curve = res.curve;
  curve.thresholds = cuts;
  curve.fpr.reserve(cuts.size());
  curve.tpr.reserve(cuts.size());
  for (double v : cuts) {
    const auto below_nom = std::lower_bound(nom.begin(), nom.end(), v);
    const auto below_ano = std::lower_bound(ano.begin(), ano.end(), v);
    curve.fpr.push_back(static_cast<double>(below_nom - nom.begin()) /
                        static_cast<double>(nom.size()));
    curve.tpr.push_back(static_cast<double>(below_ano - ano.begin()) /
                        static_cast<double>(ano.size()));
  }
  return res;
}

double empirical_false_alarm(const Detector& det, const NominalDataset& fresh,
                             double alpha) {
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    if (classify(det, fresh.row(i), alpha).is_anomaly) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(fresh.size());
}

LevelGrid level_grid(const PlanarScorer& scorer, const BoundingBox& bbox,
                     std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) throw UsageError("grid resolution must be >= 1");
  if (!(bbox.x_lo < bbox.x_hi) || !(bbox.y_lo < bbox.y_hi)) {
    throw UsageError("bounding box must have positive extent");
  }
  LevelGrid grid;
  grid.bbox = bbox;
  grid.nx = nx;
  grid.ny = ny;
  const double dx = (bbox.x_hi - bbox.x_lo) / static_cast<double>(nx);
  const double dy = (bbox.y_hi - bbox.y_lo) / static_cast<double>(ny);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    grid.xs.push_back(bbox.x_lo + (static_cast<double>(ix) + 0.5) * dx);
  }
  for (std::size_t iy = 0; iy < ny; ++iy) {
    grid.ys.push_back(bbox.y_lo + (static_cast<double>(iy) + 0.5) * dy);
  }
  grid.values.reserve(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double point[2] = {grid.xs[ix], grid.ys[iy]};
      const double v = scorer(std::span<const double>(point, 2));
      if (!std::isfinite(v)) {
        throw NumericalError("scorer produced a non-finite grid value");
      }
      grid.values.push_back(v);
    }
  }
  return grid;
}

LevelGrid level_grid(const RankModel& model, const BoundingBox& bbox,
                     std::size_t nx, std::size_t ny) {
  if (model.dim != 2) {
    throw UsageError("level grids need a 2-D model, got dimension " +
                     std::to_string(model.dim));
  }
  return level_grid(
      [&model](std::span<const double> x) {
        return decision_function(model, x);
      },
      bbox, nx, ny);
}

LatencyReport latency_benchmark(const Detector& det,
                                const NominalDataset& baseline_data,
                                std::size_t k, const Matrix& test_points,
                                std::size_t repeats) {
  if (repeats < 3) throw UsageError("latency benchmark needs repeats >= 3");
  if (test_points.rows() == 0) throw UsageError("no test points to time");

  const AklpeBaseline baseline(baseline_data, k);
  constexpr double kAlpha = 0.1;

  LatencyReport report;
  report.support_points = det.model.betas.size();
  report.support_pairs = det.model.meta.support_pairs;
  report.n_train = det.sorted_scores.size();
  report.k = k;
  report.test_points = test_points.rows();
  report.repeats = repeats;

  // sink defeats dead-code elimination of the timed loops
  double sink = 0.0;
  auto run_detector = [&] {
    for (std::size_t i = 0; i < test_points.rows(); ++i) {
      sink += classify(det, test_points.row(i), kAlpha).rank;
    }
  };
  auto run_aklpe = [&] {
    for (std::size_t i = 0; i < test_points.rows(); ++i) {
      sink += baseline.classify(test_points.row(i), kAlpha).rank;
    }
  };
  run_detector();
  run_aklpe();

  using clock = std::chrono::steady_clock;
  const double per_point =
      1.0 / static_cast<double>(test_points.rows());
  for (std::size_t r = 0; r < repeats; ++r) {
    auto t0 = clock::now();
    run_detector();
    auto t1 = clock::now();
    run_aklpe();
    auto t2 = clock::now();
    report.detector_us.push_back(
        std::chrono::duration<double, std::micro>(t1 - t0).count() *
        per_point);
    report.aklpe_us.push_back(
        std::chrono::duration<double, std::micro>(t2 - t1).count() *
        per_point);
  }
  if (!std::isfinite(sink)) throw NumericalError("non-finite benchmark sink");
  report.detector_median_us = median(report.detector_us);
  report.aklpe_median_us = median(report.aklpe_us);
  return report;
}

}  // namespace rankad
