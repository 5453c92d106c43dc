#include "rankad/model_selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "rankad/detector.hpp"
#include "rankad/kernel.hpp"

namespace rankad {

namespace {

constexpr std::uint64_t kSaltPairs = 1;
constexpr std::uint64_t kSaltFolds = 2;
constexpr std::uint64_t kSaltSolver = 3;
constexpr std::uint64_t kSaltProbes = 4;

void validate_grid(const ParamGrid& grid) {
  auto check = [](const std::vector<double>& v, const char* what) {
    if (v.empty()) throw UsageError(std::string(what) + " grid is empty");
    double prev = 0.0;
    for (double x : v) {
      if (!(x > 0.0)) throw UsageError(std::string(what) + " grid values must be positive");
      if (x <= prev) throw UsageError(std::string(what) + " grid must be strictly ascending");
      prev = x;
    }
  };
  check(grid.c_values, "C");
  check(grid.sigma_values, "sigma");
}

Matrix squared_distance_matrix(const NominalDataset& data) {
  const std::size_t n = data.size();
  Matrix sq(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sq(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = squared_distance(data.row(i), data.row(j));
      sq(i, j) = d2;
      sq(j, i) = d2;
    }
  }
  return sq;
}

struct FoldSplit {
  std::vector<PreferencePair> train;
  std::vector<PreferencePair> val;
  detail::EndpointIndex index;               // over train pairs
  std::vector<std::uint32_t> val_endpoints;  // distinct, ascending
  bool usable = false;
};

}  // namespace

std::vector<double> default_c_grid() {
  return {0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0,
          3.0,   10.0,  30.0, 100.0, 300.0, 1000.0};
}

std::vector<double> default_sigma_grid(double pivot) {
  if (!(pivot > 0.0) || !std::isfinite(pivot)) {
    throw UsageError("sigma grid pivot must be positive and finite");
  }
  std::vector<double> out;
  out.reserve(21);
  for (int i = -10; i <= 10; ++i) out.push_back(std::ldexp(pivot, i));
  return out;
}

ParamGrid default_param_grid(double pivot) {
  return {default_c_grid(), default_sigma_grid(pivot)};
}

double mean_knn_distance(const NominalDataset& data, std::size_t k) {
  const ScoreVector g = aknn_scores(data, k);
  double sum = 0.0;
  for (double s : g) sum += s;
  return -sum / static_cast<double>(g.size());
}

double disagreement(const std::vector<double>& scores,
                    const std::vector<PreferencePair>& pairs) {
  if (pairs.empty()) {
    throw UsageError("disagreement is undefined on an empty pair set");
  }
  std::size_t bad = 0;
  for (const PreferencePair& p : pairs) {
    if (!(scores[p.higher] > scores[p.lower])) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(pairs.size());
}

CvReport cv_select(const NominalDataset& data, const ParamGrid& grid,
                   const CvOptions& options) {
  validate_grid(grid);
  const std::size_t n = data.size();
  if (options.folds < 2) throw UsageError("cross-validation needs folds >= 2");
  if (n < 2 * options.folds) {
    throw UsageError("need at least 2 samples per fold, got n=" +
                     std::to_string(n) + " with " +
                     std::to_string(options.folds) + " folds");
  }

  // Levels and pairs are a property of the full dataset; folds only decide
  // which pairs train and which validate.
  const ScoreVector g = aknn_scores(data, options.k);
  const RankVector ranks = ranks_from_scores(g);
  const QuantizedLevels levels = quantize_ranks(ranks, options.m);
  PreferencePairSet pairs = generate_pairs(levels);
  if (pairs.empty()) {
    throw DataError("quantization produced a single level; no preference "
                    "pairs to cross-validate on");
  }
  pairs = subsample_pairs(pairs, options.pair_cap,
                          mix_seed(options.seed, kSaltPairs));

  CvReport report;
  report.seed = options.seed;
  report.folds = options.folds;
  report.pairs = pairs;

  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::mt19937_64 fold_rng(mix_seed(options.seed, kSaltFolds));
  std::shuffle(perm.begin(), perm.end(), fold_rng);
  report.fold_of.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    report.fold_of[perm[i]] = static_cast<std::uint32_t>(i % options.folds);
  }

  std::vector<FoldSplit> splits(options.folds);
  for (std::size_t f = 0; f < options.folds; ++f) {
    FoldSplit& split = splits[f];
    for (const PreferencePair& p : pairs.pairs) {
      const bool hi_in = report.fold_of[p.higher] == f;
      const bool lo_in = report.fold_of[p.lower] == f;
      if (hi_in && lo_in) {
        split.val.push_back(p);
      } else if (!hi_in && !lo_in) {
        split.train.push_back(p);
      }
      // Pairs straddling the fold boundary train nothing and validate
      // nothing for this fold.
    }
    split.usable = !split.train.empty() && !split.val.empty();
    if (!split.usable) continue;
    PreferencePairSet train_set;
    train_set.pairs = split.train;
    train_set.source_levels = pairs.source_levels;
    split.index = detail::compact_endpoints(train_set, n);
    for (const PreferencePair& p : split.val) {
      split.val_endpoints.push_back(p.higher);
      split.val_endpoints.push_back(p.lower);
    }
    std::sort(split.val_endpoints.begin(), split.val_endpoints.end());
    split.val_endpoints.erase(
        std::unique(split.val_endpoints.begin(), split.val_endpoints.end()),
        split.val_endpoints.end());
  }
  if (std::none_of(splits.begin(), splits.end(),
                   [](const FoldSplit& s) { return s.usable; })) {
    throw DataError("no fold has both training and validation pairs; "
                    "use fewer folds or more data");
  }

  // Background probes: uniform draws over the data's bounding box padded
  // by a quarter of each extent. Only probes that the neighbor statistic
  // puts below every training point take part; their preference against
  // any held-out point is unambiguous.
  Matrix far_probes(0, 0);
  if (options.probes > 0) {
    std::vector<double> lo(data.dim(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(data.dim(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < data.dim(); ++d) {
        lo[d] = std::min(lo[d], data.row(i)[d]);
        hi[d] = std::max(hi[d], data.row(i)[d]);
      }
    }
    std::mt19937_64 probe_rng(mix_seed(options.seed, kSaltProbes));
    Matrix drawn(options.probes, data.dim());
    for (std::size_t p = 0; p < options.probes; ++p) {
      for (std::size_t d = 0; d < data.dim(); ++d) {
        const double pad = 0.25 * (hi[d] - lo[d]);
        std::uniform_real_distribution<double> coord(lo[d] - pad, hi[d] + pad);
        drawn(p, d) = coord(probe_rng);
      }
    }
    const AklpeBaseline reference(data, options.k);
    const double g_min = *std::min_element(g.begin(), g.end());
    std::vector<std::size_t> keep;
    for (std::size_t p = 0; p < options.probes; ++p) {
      if (reference.score(drawn.row(p)) < g_min) keep.push_back(p);
    }
    far_probes = Matrix(keep.size(), data.dim());
    for (std::size_t p = 0; p < keep.size(); ++p) {
      for (std::size_t d = 0; d < data.dim(); ++d) {
        far_probes(p, d) = drawn(keep[p], d);
      }
    }
    report.probes_total = options.probes;
    report.probes_far = keep.size();
  }
  const std::size_t nf = far_probes.rows();

  const std::size_t nc = grid.c_values.size();
  const std::size_t ns = grid.sigma_values.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // slot(si, f, ci): disagreement, or NaN when the fold is unusable
  std::vector<double> dis(ns * options.folds * nc, nan);
  std::vector<char> conv(ns * options.folds * nc, 1);
  auto slot = [&](std::size_t si, std::size_t f, std::size_t ci) {
    return (si * options.folds + f) * nc + ci;
  };

  const Matrix sq = squared_distance_matrix(data);
  Matrix probe_sq(nf, n);
  for (std::size_t p = 0; p < nf; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      probe_sq(p, i) = squared_distance(far_probes.row(p), data.row(i));
    }
  }

  for (std::size_t si = 0; si < ns; ++si) {
    const KernelSpec kernel{grid.sigma_values[si]};
    const Matrix gram_full = gram_from_squared_distances(sq, kernel);
    const Matrix probe_gram =
        nf > 0 ? gram_from_squared_distances(probe_sq, kernel) : Matrix(0, 0);

    auto run_fold = [&](std::size_t f) {
      const FoldSplit& split = splits[f];
      if (!split.usable) return;
      const std::size_t ne = split.index.originals.size();
      Matrix endpoint_gram(ne, ne);
      for (std::size_t a = 0; a < ne; ++a) {
        const double* src = gram_full.row_ptr(split.index.originals[a]);
        double* dst = endpoint_gram.row_ptr(a);
        for (std::size_t b = 0; b < ne; ++b) {
          dst[b] = src[split.index.originals[b]];
        }
      }

      std::vector<double> scores(n, 0.0);
      std::vector<double> warm;
      for (std::size_t ci = 0; ci < nc; ++ci) {
        SolverConfig cfg;
        cfg.c = grid.c_values[ci];
        cfg.tol = options.tol;
        cfg.max_epochs = options.max_epochs;
        cfg.seed = mix_seed(options.seed,
                            kSaltSolver + slot(si, f, ci));
        // C ascends through the grid, so the previous solution is feasible
        // for the next box and usually close to its optimum.
        detail::DualSolution sol = detail::solve_pair_dual(
            endpoint_gram, split.index.local_pairs, cfg,
            warm.empty() ? nullptr : &warm);
        warm = sol.alphas;

        for (std::uint32_t v : split.val_endpoints) {
          const double* krow = gram_full.row_ptr(v);
          double s = 0.0;
          for (std::size_t l = 0; l < ne; ++l) {
            s += sol.betas[l] * krow[split.index.originals[l]];
          }
          scores[v] = s;
        }
        double metric = disagreement(scores, split.val);
        if (nf > 0 && !split.val_endpoints.empty()) {
          std::size_t bad = 0;
          for (std::size_t p = 0; p < nf; ++p) {
            const double* krow = probe_gram.row_ptr(p);
            double sp = 0.0;
            for (std::size_t l = 0; l < ne; ++l) {
              sp += sol.betas[l] * krow[split.index.originals[l]];
            }
            for (std::uint32_t v : split.val_endpoints) {
              if (scores[v] <= sp) ++bad;
            }
          }
          const double probe_rate =
              static_cast<double>(bad) /
              static_cast<double>(nf * split.val_endpoints.size());
          metric = 0.5 * (metric + probe_rate);
        }
        dis[slot(si, f, ci)] = metric;
        conv[slot(si, f, ci)] = sol.meta.converged ? 1 : 0;
      }
    };

    if (options.threads <= 1 || options.folds <= 1) {
      for (std::size_t f = 0; f < options.folds; ++f) run_fold(f);
    } else {
      std::atomic<std::size_t> next{0};
      const unsigned nt = std::min<unsigned>(
          options.threads, static_cast<unsigned>(options.folds));
      std::vector<std::thread> workers;
      workers.reserve(nt);
      for (unsigned t = 0; t < nt; ++t) {
        workers.emplace_back([&] {
          for (std::size_t f = next.fetch_add(1); f < options.folds;
               f = next.fetch_add(1)) {
            run_fold(f);
          }
        });
      }
      for (std::thread& w : workers) w.join();
    }
  }

  report.candidates.reserve(ns * nc);
  for (std::size_t si = 0; si < ns; ++si) {
    for (std::size_t ci = 0; ci < nc; ++ci) {
      CvCandidate cand;
      cand.c = grid.c_values[ci];
      cand.sigma = grid.sigma_values[si];
      double sum = 0.0;
      for (std::size_t f = 0; f < options.folds; ++f) {
        const double d = dis[slot(si, f, ci)];
        if (std::isnan(d)) continue;
        cand.fold_disagreement.push_back(d);
        cand.converged_all = cand.converged_all && conv[slot(si, f, ci)] != 0;
        sum += d;
      }
      cand.folds_used = cand.fold_disagreement.size();
      cand.mean_disagreement = sum / static_cast<double>(cand.folds_used);
      report.candidates.push_back(std::move(cand));
    }
  }

  report.chosen_index = 0;
  for (std::size_t i = 1; i < report.candidates.size(); ++i) {
    const CvCandidate& a = report.candidates[i];
    const CvCandidate& b = report.candidates[report.chosen_index];
    const bool better =
        a.mean_disagreement < b.mean_disagreement ||
        (a.mean_disagreement == b.mean_disagreement &&
         (a.c < b.c || (a.c == b.c && a.sigma < b.sigma)));
    if (better) report.chosen_index = i;
  }
  return report;
}

}  // namespace rankad
