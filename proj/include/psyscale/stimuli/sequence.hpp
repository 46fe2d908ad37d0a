#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "psyscale/json.hpp"
#include "psyscale/mlds/types.hpp"
#include "psyscale/stimuli/image.hpp"

namespace psyscale {

inline constexpr std::array<std::string_view, 6> kViewportTags = {"front", "back",  "left",
                                                                   "right", "top", "bottom"};

bool is_viewport_tag(std::string_view tag);

/// Phi = 0, 1/6, ..., 1.
std::array<double, kSequenceLength> nominal_scale();

struct SequenceSpec {
  ClassPair class_pair;
  std::string instance_a;
  std::string instance_b;
  std::array<double, kSequenceLength> nominal = nominal_scale();
  std::string viewport_tag = "front";

  /// Throws InvalidParameter if Phi is not strictly increasing from 0 to 1,
  /// the viewport tag is unknown, or an identifier is empty or contains '-',
  /// '/' or '@'.
  void validate() const;

  /// "a-b", with "@viewport" appended for non-front viewports.
  std::string instance_key() const;
  /// "A-B/" + instance_key(); the sequence_id stored in responses.
  std::string sequence_id() const;

  bool operator==(const SequenceSpec&) const = default;
};

Json to_json(const SequenceSpec& spec);
SequenceSpec sequence_spec_from_json(const Json& j);

struct InstanceSequence {
  SequenceSpec spec;
  std::array<GrayImage, kSequenceLength> frames;
};

/// frames[t] = alpha_blend(a, b, Phi[t]). Inputs are expected to be
/// preprocessed already.
InstanceSequence generate_sequence(const GrayImage& a, const GrayImage& b, const SequenceSpec& spec);

/// The class pair encoded in a sequence_id "A-B/...". Throws ParseError when
/// the prefix is missing or malformed.
ClassPair class_pair_of(std::string_view sequence_id);

/// Frame t's identifier, "<sequence_id>/frame_t"; embedding manifests key on it.
std::string frame_id(const std::string& sequence_id, int t);

/// Writes frame_{0..6}.png (16-bit) and sequence.json into `dir`.
void write_sequence(const std::filesystem::path& dir, const InstanceSequence& seq);
InstanceSequence read_sequence(const std::filesystem::path& dir);
SequenceSpec read_sequence_spec(const std::filesystem::path& dir);

/// Every directory under `root` holding a sequence.json, sorted by sequence_id.
std::vector<std::filesystem::path> find_sequences(const std::filesystem::path& root);

}  // namespace psyscale
