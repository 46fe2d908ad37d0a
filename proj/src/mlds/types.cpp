#include "psyscale/mlds/types.hpp"

#include <cmath>

#include "psyscale/error.hpp"

namespace psyscale {

ClassPair ClassPair::from_key(std::string_view key) {
  const auto dash = key.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == key.size() ||
      key.find('-', dash + 1) != std::string_view::npos) {
    throw Error(ErrorCode::ParseError, "class pair key must look like A-B, got '" +
                                           std::string(key) + "'");
  }
  return {std::string(key.substr(0, dash)), std::string(key.substr(dash + 1))};
}

std::string_view to_string(Choice c) {
  return c == Choice::FirstPairMoreSimilar ? "FirstPairMoreSimilar" : "SecondPairMoreSimilar";
}

std::optional<Choice> parse_choice(std::string_view text) {
  if (text == "FirstPairMoreSimilar") return Choice::FirstPairMoreSimilar;
  if (text == "SecondPairMoreSimilar") return Choice::SecondPairMoreSimilar;
  return std::nullopt;
}

PerceptualScale::PerceptualScale(std::array<double, kSequenceLength> values, double noise_sigma,
                                 std::size_t n_responses)
    : values_(values), noise_sigma_(noise_sigma), n_responses_(n_responses) {
  if (values_.front() != 0.0 || values_.back() != 1.0) {
    throw Error(ErrorCode::InvalidParameter, "perceptual scale must be anchored at 0 and 1");
  }
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] > values_[i + 1]) {
      throw Error(ErrorCode::InvalidParameter, "perceptual scale must be non-decreasing");
    }
  }
  if (!(noise_sigma_ > 0.0) || !std::isfinite(noise_sigma_)) {
    throw Error(ErrorCode::InvalidParameter, "noise sigma must be positive and finite");
  }
}

PerceptualScale PerceptualScale::linear(double noise_sigma) { return power(1.0, noise_sigma); }

PerceptualScale PerceptualScale::power(double exponent, double noise_sigma) {
  std::array<double, kSequenceLength> v{};
  for (int i = 0; i < kSequenceLength; ++i) {
    v[static_cast<std::size_t>(i)] = std::pow(i / 6.0, exponent);
  }
  v.front() = 0.0;
  v.back() = 1.0;
  return PerceptualScale(v, noise_sigma);
}

}  // namespace psyscale
