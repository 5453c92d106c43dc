#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankad/common.hpp"

namespace rankad {

struct GaussianComponent {
  double weight = 0.0;
  std::vector<double> mean;
  Matrix covariance;  // d x d, symmetric positive definite
};

struct MixtureSpec {
  std::vector<GaussianComponent> components;

  std::size_t dim() const {
    return components.empty() ? 0 : components[0].mean.size();
  }
};

struct UniformBoxSpec {
  std::vector<double> lower;
  std::vector<double> upper;  // componentwise > lower
};

/// Throws UsageError unless weights are positive and sum to 1 and every
/// covariance is symmetric positive definite of matching dimension.
void check_mixture(const MixtureSpec& spec);
void check_box(const UniformBoxSpec& spec);

/// n i.i.d. draws: pick a component by weight, then mean + L z with
/// L the Cholesky factor and z standard normal. Deterministic per seed.
Matrix sample_mixture(const MixtureSpec& spec, std::size_t n,
                      std::uint64_t seed);

/// sum_c w_c N(x; mu_c, Sigma_c), evaluated via the Cholesky factors.
double mixture_density(const MixtureSpec& spec, std::span<const double> x);

/// Monte Carlo estimate of P(f(X) <= f(x)) for X drawn from the spec.
/// Standard error <= 0.5 / sqrt(mc_samples).
double oracle_pvalue(const MixtureSpec& spec, std::span<const double> x,
                     std::size_t mc_samples, std::uint64_t seed);

Matrix sample_uniform_box(const UniformBoxSpec& spec, std::size_t n,
                          std::uint64_t seed);

/// Two overlapping isotropic components: 0.5 N([4,1], 0.5I) + 0.5 N([4,-1], 0.5I).
MixtureSpec gmm_close_spec();

/// Well-separated anisotropic pair: 0.2 N([5,0], diag(1,9)) + 0.8 N([-5,0], diag(9,1)).
MixtureSpec gmm_far_spec();

/// Standard normal in one dimension.
MixtureSpec normal1d_spec();

/// [-18, 18]^2, enclosing both planar mixtures with room to spare.
UniformBoxSpec default_box_spec();

}  // namespace rankad
