#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psyscale {

/// Number of frames in a blended sequence and therefore of perceptual scale
/// values. Positions run 0..kSequenceLength-1.
inline constexpr int kSequenceLength = 7;

/// Ordered pair of class identifiers (A, B).
struct ClassPair {
  std::string first;
  std::string second;

  /// "A-B"; used for directory names and skewness-set keys.
  std::string key() const { return first + "-" + second; }
  static ClassPair from_key(std::string_view key);

  auto operator<=>(const ClassPair&) const = default;
};

/// Four sequence positions defining two pairs, (i, j) and (k, l).
struct Quadruple {
  int i = 0;
  int j = 0;
  int k = 0;
  int l = 0;

  bool in_range(int n = kSequenceLength) const {
    return i >= 0 && j >= 0 && k >= 0 && l >= 0 && i < n && j < n && k < n && l < n;
  }
  /// i < j <= k < l.
  bool is_canonical() const { return i < j && j <= k && k < l; }
  bool is_strict() const { return i < j && j < k && k < l; }

  auto operator<=>(const Quadruple&) const = default;
};

enum class Choice : std::uint8_t { FirstPairMoreSimilar, SecondPairMoreSimilar };

constexpr Choice flip(Choice c) noexcept {
  return c == Choice::FirstPairMoreSimilar ? Choice::SecondPairMoreSimilar
                                           : Choice::FirstPairMoreSimilar;
}

std::string_view to_string(Choice c);
std::optional<Choice> parse_choice(std::string_view text);

/// One 2AFC answer, stored in canonical (unflipped) form.
struct TrialResponse {
  std::string sequence_id;
  ClassPair class_pair;
  Quadruple quadruple;
  Choice choice = Choice::FirstPairMoreSimilar;
  std::string observer_id;
  std::uint64_t presentation_seed = 0;
  std::int64_t timestamp_ms = 0;

  bool operator==(const TrialResponse&) const = default;
};

/// Fitted suprathreshold values psi_0..psi_6 plus the decision-noise sigma.
/// Construction validates the anchoring and monotonicity invariants.
class PerceptualScale {
 public:
  PerceptualScale(std::array<double, kSequenceLength> values, double noise_sigma,
                  std::size_t n_responses = 0);

  /// psi_i = i / 6.
  static PerceptualScale linear(double noise_sigma = 1.0);
  /// psi_i = (i / 6)^exponent.
  static PerceptualScale power(double exponent, double noise_sigma = 1.0);

  const std::array<double, kSequenceLength>& values() const { return values_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  double noise_sigma() const { return noise_sigma_; }
  std::size_t n_responses() const { return n_responses_; }

  bool operator==(const PerceptualScale&) const = default;

 private:
  std::array<double, kSequenceLength> values_;
  double noise_sigma_;
  std::size_t n_responses_;
};

}  // namespace psyscale
