#include "rankad/ranksvm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_map>

namespace rankad {

namespace detail {

EndpointIndex compact_endpoints(const PreferencePairSet& pairs, std::size_t n) {
  EndpointIndex out;
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  local.reserve(pairs.size() * 2);
  out.local_pairs.reserve(pairs.size());
  auto intern = [&](std::uint32_t orig) -> std::uint32_t {
    if (orig >= n) {
      throw UsageError("preference pair references sample " +
                       std::to_string(orig) + " but dataset has " +
                       std::to_string(n) + " rows");
    }
    auto [it, inserted] = local.try_emplace(
        orig, static_cast<std::uint32_t>(out.originals.size()));
    if (inserted) out.originals.push_back(orig);
    return it->second;
  };
  for (const PreferencePair& p : pairs.pairs) {
    if (p.higher == p.lower) {
      throw UsageError("degenerate preference pair (" +
                       std::to_string(p.higher) + ", " +
                       std::to_string(p.lower) + ")");
    }
    out.local_pairs.emplace_back(intern(p.higher), intern(p.lower));
  }
  return out;
}

DualSolution solve_pair_dual(
    const Matrix& gram,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& local_pairs,
    const SolverConfig& cfg, const std::vector<double>* warm) {
  const std::size_t np = local_pairs.size();
  const std::size_t ne = gram.rows();
  if (np == 0) throw UsageError("cannot train on an empty preference pair set");
  if (cfg.c <= 0.0) throw UsageError("C must be positive");
  if (cfg.tol <= 0.0) throw UsageError("solver tolerance must be positive");
  if (warm != nullptr && warm->size() != np) {
    throw UsageError("warm start size does not match the pair count");
  }

  // Q_pp = k(i,i) - 2k(i,j) + k(j,j); with a PSD kernel this is >= 0 up to
  // rounding. Anything clearly negative means the Gram matrix is broken.
  std::vector<double> qdiag(np);
  for (std::size_t p = 0; p < np; ++p) {
    const auto [i, j] = local_pairs[p];
    const double q = gram(i, i) - 2.0 * gram(i, j) + gram(j, j);
    if (q < -1e-9) {
      throw NumericalError("kernel matrix is not positive semidefinite "
                           "(pair diagonal " + std::to_string(q) + ")");
    }
    qdiag[p] = std::max(q, 0.0);
  }

  DualSolution sol;
  sol.alphas.assign(np, 0.0);
  sol.betas.assign(ne, 0.0);
  if (warm != nullptr) {
    for (std::size_t p = 0; p < np; ++p) {
      sol.alphas[p] = std::clamp((*warm)[p], 0.0, cfg.c);
    }
    for (std::size_t p = 0; p < np; ++p) {
      const auto [i, j] = local_pairs[p];
      sol.betas[i] += sol.alphas[p];
      sol.betas[j] -= sol.alphas[p];
    }
  }

  // g[l] = sum_t beta_t K(l, t), kept incrementally; the pair margin
  // g[i_p] - g[j_p] then costs O(1) per visit.
  std::vector<double> g(ne, 0.0);
  for (std::size_t t = 0; t < ne; ++t) {
    const double b = sol.betas[t];
    if (b == 0.0) continue;
    const double* krow = gram.row_ptr(t);
    for (std::size_t l = 0; l < ne; ++l) g[l] += b * krow[l];
  }

  std::vector<std::size_t> order(np);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);

  sol.meta.c = cfg.c;
  sol.meta.solver_seed = cfg.seed;
  sol.meta.converged = false;

  auto dual_value = [&]() {
    double asum = 0.0;
    for (double a : sol.alphas) asum += a;
    double quad = 0.0;
    for (std::size_t l = 0; l < ne; ++l) quad += sol.betas[l] * g[l];
    return asum - 0.5 * quad;
  };

  std::size_t epoch = 0;
  for (; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double max_violation = 0.0;
    for (std::size_t p : order) {
      const auto [i, j] = local_pairs[p];
      const double grad = 1.0 - (g[i] - g[j]);
      const double a = sol.alphas[p];

      // Projected gradient: the KKT conditions in box form.
      double pg = grad;
      if (a <= 0.0) {
        pg = std::max(grad, 0.0);
      } else if (a >= cfg.c) {
        pg = std::min(grad, 0.0);
      }
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0) continue;

      double a_new;
      if (qdiag[p] < 1e-12) {
        // Flat direction: the dual is linear in this coordinate, so the
        // optimum sits at whichever bound the gradient points to.
        a_new = grad > 0.0 ? cfg.c : 0.0;
      } else {
        a_new = std::clamp(a + grad / qdiag[p], 0.0, cfg.c);
      }
      const double delta = a_new - a;
      if (delta == 0.0) continue;
      sol.alphas[p] = a_new;
      sol.betas[i] += delta;
      sol.betas[j] -= delta;
      const double* gi = gram.row_ptr(i);
      const double* gj = gram.row_ptr(j);
      for (std::size_t t = 0; t < ne; ++t) g[t] += delta * (gi[t] - gj[t]);
    }
    sol.meta.dual_objective_trace.push_back(dual_value());
    if (max_violation <= cfg.tol) {
      sol.meta.converged = true;
      ++epoch;
      break;
    }
  }

  sol.meta.epochs = epoch;
  sol.meta.dual_objective = dual_value();
  sol.meta.support_pairs = static_cast<std::size_t>(
      std::count_if(sol.alphas.begin(), sol.alphas.end(),
                    [](double a) { return a != 0.0; }));
  return sol;
}

}  // namespace detail

RankModel train(const NominalDataset& data, const PreferencePairSet& pairs,
                const KernelSpec& kernel, const SolverConfig& cfg) {
  if (kernel.sigma <= 0.0) throw UsageError("kernel sigma must be positive");
  detail::EndpointIndex idx = detail::compact_endpoints(pairs, data.size());

  const Matrix endpoints = data.points().take_rows(idx.originals);
  const Matrix gram = gram_matrix(endpoints, kernel);
  detail::DualSolution sol = detail::solve_pair_dual(gram, idx.local_pairs, cfg);

  RankModel model;
  model.kernel = kernel;
  model.dim = data.dim();
  model.meta = std::move(sol.meta);
  model.dual_alphas = std::move(sol.alphas);

  std::vector<std::uint32_t> keep;
  for (std::uint32_t l = 0; l < idx.originals.size(); ++l) {
    if (sol.betas[l] != 0.0) keep.push_back(idx.originals[l]);
  }
  model.support_points = data.points().take_rows(keep);
  model.betas.reserve(keep.size());
  for (std::uint32_t l = 0; l < idx.originals.size(); ++l) {
    if (sol.betas[l] != 0.0) model.betas.push_back(sol.betas[l]);
  }
  return model;
}

double decision_function(const RankModel& model, std::span<const double> x) {
  if (x.size() != model.dim) {
    throw UsageError("point has dimension " + std::to_string(x.size()) +
                     " but the model expects " + std::to_string(model.dim));
  }
  const double inv_s2 = 1.0 / (model.kernel.sigma * model.kernel.sigma);
  double g = 0.0;
  for (std::size_t l = 0; l < model.betas.size(); ++l) {
    g += model.betas[l] *
         std::exp(-squared_distance(model.support_points.row(l), x) * inv_s2);
  }
  return g;
}

std::vector<double> decision_function(const RankModel& model,
                                      const Matrix& points) {
  std::vector<double> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out[i] = decision_function(model, points.row(i));
  }
  return out;
}

double primal_objective(const RankModel& model, const NominalDataset& data,
                        const PreferencePairSet& pairs, double c) {
  const std::vector<double> g = decision_function(model, data.points());
  double quad = 0.0;
  for (std::size_t l = 0; l < model.betas.size(); ++l) {
    quad += model.betas[l] * decision_function(model, model.support_points.row(l));
  }
  double hinge = 0.0;
  for (const PreferencePair& p : pairs.pairs) {
    hinge += std::max(0.0, 1.0 - (g[p.higher] - g[p.lower]));
  }
  return 0.5 * quad + c * hinge;
}

double dual_objective(const RankModel& model) {
  double asum = 0.0;
  for (double a : model.dual_alphas) asum += a;
  double quad = 0.0;
  for (std::size_t l = 0; l < model.betas.size(); ++l) {
    quad += model.betas[l] * decision_function(model, model.support_points.row(l));
  }
  return asum - 0.5 * quad;
}

double kkt_max_violation(const RankModel& model, const NominalDataset& data,
                         const PreferencePairSet& pairs, double c) {
  if (model.dual_alphas.size() != pairs.size()) {
    throw UsageError("model dual state does not match the pair set");
  }
  const std::vector<double> g = decision_function(model, data.points());
  double worst = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const PreferencePair& pr = pairs.pairs[p];
    const double grad = 1.0 - (g[pr.higher] - g[pr.lower]);
    const double a = model.dual_alphas[p];
    double pg = grad;
    if (a <= 0.0) {
      pg = std::max(grad, 0.0);
    } else if (a >= c) {
      pg = std::min(grad, 0.0);
    }
    worst = std::max(worst, std::abs(pg));
  }
  return worst;
}

}  // namespace rankad
