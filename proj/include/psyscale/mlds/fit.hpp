#pragma once

#include <cstdint>
#include <span>

#include "psyscale/mlds/likelihood.hpp"
#include "psyscale/mlds/types.hpp"

namespace psyscale {

struct FitConfig {
  int max_iterations = 500;
  /// Absolute change in log-likelihood between iterations that counts as converged.
  double ll_tolerance = 1e-8;
  /// Gradient infinity-norm (in the optimizer's parameterization) that counts as converged.
  double grad_tolerance = 1e-8;
  int n_restarts = 5;
  std::uint64_t rng_seed = 0;
  /// Floors checked before fitting; incomplete designs pass as long as these hold.
  std::size_t min_responses = 35;
  std::size_t min_strict_quadruples = 35;

  /// Throws InvalidParameter when an invariant is violated.
  void validate() const;
};

struct FitResult {
  PerceptualScale scale;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations_used = 0;

  bool operator==(const FitResult&) const = default;
};

/// Maximum-likelihood difference scaling. The interior scale values are
/// parameterized as normalized cumulative sums of exp(theta) increments and
/// sigma as exp(log_sigma), so every iterate is a valid monotone anchored
/// scale. Best of `n_restarts` BFGS runs from perturbed linear starts.
///
/// Throws InsufficientData below the configured floors and NonConvergence only
/// if every restart fails to produce a finite likelihood. A run that stops at
/// the iteration cap, or whose fitted increments collapse below 1e-9, is
/// returned with converged = false.
FitResult fit_mlds(std::span<const TrialResponse> responses, const FitConfig& config = {});
FitResult fit_mlds(const ResponseTable& table, const FitConfig& config = {});

namespace detail {

inline constexpr int kFreeParameters = 6;  // five log-increments and log sigma
using ParameterVector = std::array<double, kFreeParameters>;

/// Maps optimizer parameters to (scale values, sigma).
void unpack_parameters(const ParameterVector& theta, std::array<double, kSequenceLength>& values,
                       double& sigma);

/// Log-likelihood and its gradient with respect to the optimizer parameters.
double log_likelihood_theta(const ParameterVector& theta, const ResponseTable& table,
                            ParameterVector* grad);

}  // namespace detail

}  // namespace psyscale
