#include "psyscale/mlds/likelihood.hpp"

#include <cmath>
#include <map>
#include <string>

#include "psyscale/error.hpp"
#include "psyscale/mlds/normal.hpp"

namespace psyscale {

ResponseTable::ResponseTable(std::span<const TrialResponse> responses) {
  if (responses.empty()) {
    throw Error(ErrorCode::InsufficientData, "no responses");
  }
  std::map<Quadruple, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : responses) {
    if (!r.quadruple.in_range()) {
      throw Error(ErrorCode::MalformedResponse,
                  "quadruple index out of range in sequence '" + r.sequence_id + "'");
    }
    auto& c = counts[r.quadruple];
    if (r.choice == Choice::FirstPairMoreSimilar) {
      ++c.first;
    } else {
      ++c.second;
    }
  }
  cells_.reserve(counts.size());
  for (const auto& [q, c] : counts) {
    cells_.push_back({q, static_cast<double>(c.first), static_cast<double>(c.second)});
  }
  n_responses_ = responses.size();
}

std::size_t ResponseTable::n_strict_quadruples() const {
  std::size_t n = 0;
  for (const auto& c : cells_) {
    if (c.quadruple.is_strict()) ++n;
  }
  return n;
}

namespace detail {

double log_likelihood_raw(const std::array<double, kSequenceLength>& values, double sigma,
                          const ResponseTable& table,
                          std::array<double, kSequenceLength>* grad_values, double* grad_sigma) {
  double total = 0.0;
  for (const auto& cell : table.cells()) {
    const auto& q = cell.quadruple;
    const double d1_signed = values[static_cast<std::size_t>(q.j)] - values[static_cast<std::size_t>(q.i)];
    const double d2_signed = values[static_cast<std::size_t>(q.l)] - values[static_cast<std::size_t>(q.k)];
    const double s1 = d1_signed < 0.0 ? -1.0 : 1.0;
    const double s2 = d2_signed < 0.0 ? -1.0 : 1.0;
    const double z = (s2 * d2_signed - s1 * d1_signed) / sigma;

    double dz = 0.0;  // d(cell log-likelihood) / dz
    if (cell.first_count > 0) {
      total += cell.first_count * log_normal_cdf(z);
      dz += cell.first_count * inverse_mills_ratio(z);
    }
    if (cell.second_count > 0) {
      total += cell.second_count * log_normal_cdf(-z);
      dz -= cell.second_count * inverse_mills_ratio(-z);
    }

    if (grad_values != nullptr) {
      auto& g = *grad_values;
      const double a = dz / sigma;
      g[static_cast<std::size_t>(q.l)] += a * s2;
      g[static_cast<std::size_t>(q.k)] -= a * s2;
      g[static_cast<std::size_t>(q.j)] -= a * s1;
      g[static_cast<std::size_t>(q.i)] += a * s1;
    }
    if (grad_sigma != nullptr) {
      *grad_sigma -= dz * z / sigma;
    }
  }
  return total;
}

}  // namespace detail

double probability_first(const PerceptualScale& scale, const Quadruple& q) {
  const double d1 = std::abs(scale[q.j] - scale[q.i]);
  const double d2 = std::abs(scale[q.l] - scale[q.k]);
  return normal_cdf((d2 - d1) / scale.noise_sigma());
}

double log_likelihood(const PerceptualScale& scale, const ResponseTable& table) {
  return detail::log_likelihood_raw(scale.values(), scale.noise_sigma(), table, nullptr, nullptr);
}

double log_likelihood(const PerceptualScale& scale, std::span<const TrialResponse> responses) {
  return log_likelihood(scale, ResponseTable(responses));
}

ScaleGradient grad_log_likelihood(const PerceptualScale& scale, const ResponseTable& table) {
  std::array<double, kSequenceLength> gv{};
  double gs = 0.0;
  detail::log_likelihood_raw(scale.values(), scale.noise_sigma(), table, &gv, &gs);
  ScaleGradient out;
  for (std::size_t m = 0; m < out.psi.size(); ++m) out.psi[m] = gv[m + 1];
  out.sigma = gs;
  return out;
}

ScaleGradient grad_log_likelihood(const PerceptualScale& scale,
                                  std::span<const TrialResponse> responses) {
  return grad_log_likelihood(scale, ResponseTable(responses));
}

}  // namespace psyscale
