// Per-point scoring cost: the trained detector (kernel expansion over its
// support points) against the plain k-NN baseline, as training size grows.
// The baseline touches all n training points per probe; the detector cost
// follows the support size, so the gap widens with n.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <utility>

#include "rankad/datagen.hpp"
#include "rankad/detector.hpp"
#include "rankad/kernel.hpp"
#include "rankad/knn.hpp"
#include "rankad/model_selection.hpp"
#include "rankad/pairs.hpp"
#include "rankad/ranksvm.hpp"

namespace {

using namespace rankad;

struct Bundle {
  Detector det;
  AklpeBaseline baseline;
  Matrix probes;
};

const Bundle& bundle_for(std::size_t n) {
  static std::map<std::size_t, Bundle> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  NominalDataset data(sample_mixture(gmm_far_spec(), n, 19));
  const ScoreVector g = aknn_scores(data, kDefaultNeighbors);
  const QuantizedLevels levels =
      quantize_ranks(ranks_from_scores(g), kDefaultQuantizationLevels);
  const PreferencePairSet pairs =
      subsample_pairs(generate_pairs(levels), 400, 20);

  SolverConfig cfg;
  cfg.c = 1.0;
  cfg.tol = 1e-4;
  cfg.max_epochs = 500;
  cfg.seed = 21;
  const KernelSpec kernel{mean_knn_distance(data, kDefaultNeighbors)};
  const RankModel model = train(data, pairs, kernel, cfg);

  Bundle bundle{build_detector(model, data),
                AklpeBaseline(data, kDefaultNeighbors),
                sample_mixture(gmm_far_spec(), 256, 22)};
  it = cache.emplace(n, std::move(bundle)).first;
  return it->second;
}

void BM_detector_classify(benchmark::State& state) {
  const Bundle& b = bundle_for(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto res = classify(b.det, b.probes.row(i), 0.1);
    benchmark::DoNotOptimize(res.rank);
    i = (i + 1) % b.probes.rows();
  }
  state.counters["support_points"] =
      static_cast<double>(b.det.model.betas.size());
}
BENCHMARK(BM_detector_classify)->Arg(500)->Arg(1000)->Arg(2000)->Arg(5000);

void BM_aklpe_classify(benchmark::State& state) {
  const Bundle& b = bundle_for(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto res = b.baseline.classify(b.probes.row(i), 0.1);
    benchmark::DoNotOptimize(res.rank);
    i = (i + 1) % b.probes.rows();
  }
}
BENCHMARK(BM_aklpe_classify)->Arg(500)->Arg(1000)->Arg(2000)->Arg(5000);

void BM_train_pipeline(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    NominalDataset data(sample_mixture(gmm_close_spec(), n, 31));
    const ScoreVector g = aknn_scores(data, kDefaultNeighbors);
    const QuantizedLevels levels =
        quantize_ranks(ranks_from_scores(g), kDefaultQuantizationLevels);
    const PreferencePairSet pairs =
        subsample_pairs(generate_pairs(levels), 400, 32);
    SolverConfig cfg;
    cfg.c = 1.0;
    cfg.tol = 1e-3;
    cfg.max_epochs = 200;
    cfg.seed = 33;
    const RankModel model = train(data, pairs, KernelSpec{1.5}, cfg);
    benchmark::DoNotOptimize(model.meta.dual_objective);
  }
}
BENCHMARK(BM_train_pipeline)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
