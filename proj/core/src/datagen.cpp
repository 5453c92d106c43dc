#include "rankad/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace rankad {

namespace {

/// Lower-triangular L with Sigma = L L'. Throws on a non-SPD input.
Matrix cholesky(const Matrix& sigma) {
  const std::size_t d = sigma.rows();
  Matrix l(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = sigma(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) {
          throw UsageError("covariance matrix is not positive definite");
        }
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

struct PreparedComponent {
  const GaussianComponent* src = nullptr;
  Matrix chol;
  double norm = 0.0;  // (2 pi)^(d/2) * prod(L_ii)
};

std::vector<PreparedComponent> prepare(const MixtureSpec& spec) {
  check_mixture(spec);
  const std::size_t d = spec.dim();
  std::vector<PreparedComponent> out;
  out.reserve(spec.components.size());
  for (const GaussianComponent& comp : spec.components) {
    PreparedComponent p;
    p.src = &comp;
    p.chol = cholesky(comp.covariance);
    double det_root = 1.0;
    for (std::size_t i = 0; i < d; ++i) det_root *= p.chol(i, i);
    p.norm = std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d)) *
             det_root;
    out.push_back(std::move(p));
  }
  return out;
}

/// exp(-z'z / 2) / norm with z solving L z = x - mu.
double component_density(const PreparedComponent& p,
                         std::span<const double> x) {
  const std::size_t d = x.size();
  std::vector<double> z(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = x[i] - p.src->mean[i];
    for (std::size_t k = 0; k < i; ++k) s -= p.chol(i, k) * z[k];
    z[i] = s / p.chol(i, i);
  }
  double quad = 0.0;
  for (double zi : z) quad += zi * zi;
  return std::exp(-0.5 * quad) / p.norm;
}

MixtureSpec isotropic_pair(double w0, std::vector<double> mu0,
                           std::vector<double> var0, double w1,
                           std::vector<double> mu1, std::vector<double> var1) {
  const std::size_t d = mu0.size();
  auto diag = [d](const std::vector<double>& v) {
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = v[i];
    return m;
  };
  MixtureSpec spec;
  spec.components.push_back({w0, std::move(mu0), diag(var0)});
  spec.components.push_back({w1, std::move(mu1), diag(var1)});
  return spec;
}

}  // namespace

void check_mixture(const MixtureSpec& spec) {
  if (spec.components.empty()) {
    throw UsageError("mixture needs at least one component");
  }
  const std::size_t d = spec.dim();
  if (d == 0) throw UsageError("mixture components must have dimension >= 1");
  double wsum = 0.0;
  for (const GaussianComponent& comp : spec.components) {
    if (!(comp.weight > 0.0)) {
      throw UsageError("component weights must be positive");
    }
    wsum += comp.weight;
    if (comp.mean.size() != d || comp.covariance.rows() != d ||
        comp.covariance.cols() != d) {
      throw UsageError("mixture components disagree on dimension");
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        if (std::abs(comp.covariance(i, j) - comp.covariance(j, i)) > 1e-12) {
          throw UsageError("covariance matrix must be symmetric");
        }
      }
    }
    cholesky(comp.covariance);  // SPD or throw
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw UsageError("component weights must sum to 1, got " +
                     std::to_string(wsum));
  }
}

void check_box(const UniformBoxSpec& spec) {
  if (spec.lower.empty() || spec.lower.size() != spec.upper.size()) {
    throw UsageError("box corners must be non-empty and of equal dimension");
  }
  for (std::size_t i = 0; i < spec.lower.size(); ++i) {
    if (!(spec.lower[i] < spec.upper[i])) {
      throw UsageError("box lower corner must be strictly below the upper "
                       "corner in every coordinate");
    }
  }
}

Matrix sample_mixture(const MixtureSpec& spec, std::size_t n,
                      std::uint64_t seed) {
  if (n == 0) throw UsageError("cannot sample 0 points");
  const std::vector<PreparedComponent> comps = prepare(spec);
  const std::size_t d = spec.dim();

  std::vector<double> cum;
  cum.reserve(comps.size());
  double acc = 0.0;
  for (const PreparedComponent& p : comps) {
    acc += p.src->weight;
    cum.push_back(acc);
  }
  cum.back() = 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix out(n, d);
  std::vector<double> z(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double u = unit(rng);
    const std::size_t c = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    const PreparedComponent& p = comps[std::min(c, comps.size() - 1)];
    for (std::size_t i = 0; i < d; ++i) z[i] = gauss(rng);
    for (std::size_t i = 0; i < d; ++i) {
      double x = p.src->mean[i];
      for (std::size_t k = 0; k <= i; ++k) x += p.chol(i, k) * z[k];
      out(r, i) = x;
    }
  }
  return out;
}

double mixture_density(const MixtureSpec& spec, std::span<const double> x) {
  const std::vector<PreparedComponent> comps = prepare(spec);
  if (x.size() != spec.dim()) {
    throw UsageError("point has dimension " + std::to_string(x.size()) +
                     " but the mixture has " + std::to_string(spec.dim()));
  }
  double f = 0.0;
  for (const PreparedComponent& p : comps) {
    f += p.src->weight * component_density(p, x);
  }
  return f;
}

double oracle_pvalue(const MixtureSpec& spec, std::span<const double> x,
                     std::size_t mc_samples, std::uint64_t seed) {
  if (mc_samples == 0) throw UsageError("mc_samples must be >= 1");
  const double fx = mixture_density(spec, x);
  const Matrix draws = sample_mixture(spec, mc_samples, seed);
  const std::vector<PreparedComponent> comps = prepare(spec);
  std::size_t below = 0;
  for (std::size_t r = 0; r < draws.rows(); ++r) {
    double f = 0.0;
    for (const PreparedComponent& p : comps) {
      f += p.src->weight * component_density(p, draws.row(r));
    }
    if (f <= fx) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(mc_samples);
}

Matrix sample_uniform_box(const UniformBoxSpec& spec, std::size_t n,
                          std::uint64_t seed) {
  if (n == 0) throw UsageError("cannot sample 0 points");
  check_box(spec);
  const std::size_t d = spec.lower.size();
  std::mt19937_64 rng(seed);
  Matrix out(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      std::uniform_real_distribution<double> coord(spec.lower[i],
                                                   spec.upper[i]);
      out(r, i) = coord(rng);
    }
  }
  return out;
}

MixtureSpec gmm_close_spec() {
  return isotropic_pair(0.5, {4.0, 1.0}, {0.5, 0.5},
                        0.5, {4.0, -1.0}, {0.5, 0.5});
}

MixtureSpec gmm_far_spec() {
  return isotropic_pair(0.2, {5.0, 0.0}, {1.0, 9.0},
                        0.8, {-5.0, 0.0}, {9.0, 1.0});
}

MixtureSpec normal1d_spec() {
  MixtureSpec spec;
  Matrix cov(1, 1);
  cov(0, 0) = 1.0;
  spec.components.push_back({1.0, {0.0}, cov});
  return spec;
}

UniformBoxSpec default_box_spec() {
  return {{-18.0, -18.0}, {18.0, 18.0}};
}

}  // namespace rankad
