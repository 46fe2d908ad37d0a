#pragma once

#include <array>
#include <span>
#include <vector>

#include "psyscale/mlds/types.hpp"

namespace psyscale {

/// Responses collapsed to counts per (quadruple, choice) cell. The likelihood
/// depends on responses only through these counts, so pooling, reordering or
/// duplicating responses maps to exact count arithmetic. Cells are kept in
/// lexicographic order, which fixes the summation order.
class ResponseTable {
 public:
  struct Cell {
    Quadruple quadruple;
    double first_count = 0;   // FirstPairMoreSimilar
    double second_count = 0;  // SecondPairMoreSimilar
  };

  /// Throws InsufficientData on an empty list, MalformedResponse on an index
  /// outside 0..6.
  explicit ResponseTable(std::span<const TrialResponse> responses);

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t n_responses() const { return n_responses_; }
  /// Number of distinct strict quadruples with at least one response.
  std::size_t n_strict_quadruples() const;

 private:
  std::vector<Cell> cells_;
  std::size_t n_responses_ = 0;
};

/// Gradient with respect to the free parameters psi_1..psi_5 and sigma.
struct ScaleGradient {
  std::array<double, 5> psi{};
  double sigma = 0.0;
};

/// P(FirstPairMoreSimilar) = Phi((|psi_l - psi_k| - |psi_j - psi_i|) / sigma).
double probability_first(const PerceptualScale& scale, const Quadruple& q);

double log_likelihood(const PerceptualScale& scale, std::span<const TrialResponse> responses);
double log_likelihood(const PerceptualScale& scale, const ResponseTable& table);

ScaleGradient grad_log_likelihood(const PerceptualScale& scale,
                                  std::span<const TrialResponse> responses);
ScaleGradient grad_log_likelihood(const PerceptualScale& scale, const ResponseTable& table);

namespace detail {

/// Log-likelihood over raw (possibly unnormalized, possibly non-monotone)
/// position values; the building block shared by the public API and the
/// optimizer. `grad_values` (size 7) and `grad_sigma` are accumulated when
/// non-null.
double log_likelihood_raw(const std::array<double, kSequenceLength>& values, double sigma,
                          const ResponseTable& table,
                          std::array<double, kSequenceLength>* grad_values, double* grad_sigma);

}  // namespace detail

}  // namespace psyscale
