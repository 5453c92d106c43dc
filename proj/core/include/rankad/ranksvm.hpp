#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rankad/common.hpp"
#include "rankad/kernel.hpp"
#include "rankad/pairs.hpp"

namespace rankad {

struct SolverConfig {
  double c = 1.0;
  double tol = 1e-4;
  std::size_t max_epochs = 10000;
  /// Seeds the per-epoch shuffle of the coordinate order.
  std::uint64_t seed = 0;
};

struct TrainingMeta {
  double c = 1.0;
  double dual_objective = 0.0;
  std::size_t epochs = 0;
  bool converged = false;
  std::size_t support_pairs = 0;
  std::uint64_t solver_seed = 0;
  /// Dual objective after each epoch; not persisted.
  std::vector<double> dual_objective_trace;
};

/// Kernelized pairwise ranking scorer g(x) = sum_l beta_l k(x_l, x).
/// `support_points` keeps only points with beta != 0; dropping zero
/// coefficients does not change g anywhere.
struct RankModel {
  KernelSpec kernel;
  std::size_t dim = 0;
  Matrix support_points;
  std::vector<double> betas;
  /// Per-pair dual coefficients in [0, C], aligned with the training pair
  /// set. Empty on models restored from disk (the scorer alone is persisted).
  std::vector<double> dual_alphas;
  TrainingMeta meta;
};

/// Solve the pairwise ranking QP in its dual form:
///   max  sum_p a_p - 1/2 sum_{p,q} a_p a_q Q_pq,   0 <= a_p <= C,
/// with Q_pq = k(i_p,i_q) - k(i_p,j_q) - k(j_p,i_q) + k(j_p,j_q),
/// by dual coordinate descent over the pair variables (exact single-variable
/// update clipped to the box; there is no bias term, hence no equality
/// constraint). Stops when the largest projected-gradient KKT violation
/// drops to cfg.tol, or flags meta.converged = false at max_epochs.
RankModel train(const NominalDataset& data, const PreferencePairSet& pairs,
                const KernelSpec& kernel, const SolverConfig& cfg);

double decision_function(const RankModel& model, std::span<const double> x);
std::vector<double> decision_function(const RankModel& model, const Matrix& points);

/// 1/2 b'Kb + C * sum_p hinge(1 - (g(x_ip) - g(x_jp))).
double primal_objective(const RankModel& model, const NominalDataset& data,
                        const PreferencePairSet& pairs, double c);

/// sum(alpha) - 1/2 b'Kb, computed from the stored coefficients.
double dual_objective(const RankModel& model);

/// Largest projected-gradient violation over the training pairs; needs the
/// model's dual state. Zero at an exact optimum.
double kkt_max_violation(const RankModel& model, const NominalDataset& data,
                         const PreferencePairSet& pairs, double c);

namespace detail {

/// Pairs re-indexed against the compact list of distinct endpoints.
struct EndpointIndex {
  std::vector<std::uint32_t> originals;  // local -> original dataset index
  std::vector<std::pair<std::uint32_t, std::uint32_t>> local_pairs;
};

EndpointIndex compact_endpoints(const PreferencePairSet& pairs, std::size_t n);

struct DualSolution {
  std::vector<double> alphas;  // per pair
  std::vector<double> betas;   // per endpoint, local indexing
  TrainingMeta meta;
};

/// Core coordinate-descent loop over a precomputed endpoint Gram matrix.
/// `warm` (optional) seeds the alphas, clipped into [0, C].
DualSolution solve_pair_dual(
    const Matrix& gram,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& local_pairs,
    const SolverConfig& cfg, const std::vector<double>* warm = nullptr);

}  // namespace detail

}  // namespace rankad
