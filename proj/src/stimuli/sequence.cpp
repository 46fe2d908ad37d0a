#include "psyscale/stimuli/sequence.hpp"

#include <algorithm>

#include "psyscale/error.hpp"
#include "psyscale/io/png.hpp"
#include "psyscale/mlds/serialize.hpp"
#include "psyscale/stimuli/preprocess.hpp"

namespace psyscale {

namespace fs = std::filesystem;

namespace {

void check_identifier(const std::string& id, const char* what) {
  if (id.empty() || id.find_first_of("-/@") != std::string::npos) {
    throw Error(ErrorCode::InvalidParameter,
                std::string(what) + " '" + id + "' must be non-empty without '-', '/' or '@'");
  }
}

}  // namespace

bool is_viewport_tag(std::string_view tag) {
  return std::find(kViewportTags.begin(), kViewportTags.end(), tag) != kViewportTags.end();
}

std::array<double, kSequenceLength> nominal_scale() {
  std::array<double, kSequenceLength> phi{};
  for (int t = 0; t < kSequenceLength; ++t) phi[static_cast<std::size_t>(t)] = t / 6.0;
  return phi;
}

void SequenceSpec::validate() const {
  check_identifier(class_pair.first, "class");
  check_identifier(class_pair.second, "class");
  check_identifier(instance_a, "instance");
  check_identifier(instance_b, "instance");
  if (!is_viewport_tag(viewport_tag)) {
    throw Error(ErrorCode::InvalidParameter, "unknown viewport tag '" + viewport_tag + "'");
  }
  if (nominal.front() != 0.0 || nominal.back() != 1.0) {
    throw Error(ErrorCode::InvalidParameter, "nominal scale must run from 0 to 1");
  }
  for (std::size_t t = 1; t < nominal.size(); ++t) {
    if (!(nominal[t] > nominal[t - 1])) {
      throw Error(ErrorCode::InvalidParameter, "nominal scale must be strictly increasing");
    }
  }
}

std::string SequenceSpec::instance_key() const {
  auto key = instance_a + "-" + instance_b;
  if (viewport_tag != "front") key += "@" + viewport_tag;
  return key;
}

std::string SequenceSpec::sequence_id() const { return class_pair.key() + "/" + instance_key(); }

Json to_json(const SequenceSpec& spec) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["sequence_id"] = spec.sequence_id();
  j["class_pair"] = Json::array({spec.class_pair.first, spec.class_pair.second});
  j["instance_pair"] = Json::array({spec.instance_a, spec.instance_b});
  j["nominal_scale"] = spec.nominal;
  j["viewport_tag"] = spec.viewport_tag;
  return j;
}

SequenceSpec sequence_spec_from_json(const Json& j) {
  check_schema_version(j, "sequence spec");
  try {
    SequenceSpec spec;
    const auto& cp = j.at("class_pair");
    const auto& ip = j.at("instance_pair");
    if (cp.size() != 2 || ip.size() != 2) throw Error(ErrorCode::ParseError, "pairs need two entries");
    spec.class_pair = {cp[0].get<std::string>(), cp[1].get<std::string>()};
    spec.instance_a = ip[0].get<std::string>();
    spec.instance_b = ip[1].get<std::string>();
    const auto& phi = j.at("nominal_scale");
    if (phi.size() != kSequenceLength) throw Error(ErrorCode::ParseError, "nominal_scale needs 7 values");
    for (std::size_t t = 0; t < spec.nominal.size(); ++t) spec.nominal[t] = phi[t].get<double>();
    spec.viewport_tag = j.at("viewport_tag").get<std::string>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("sequence spec: ") + e.what());
  }
}

InstanceSequence generate_sequence(const GrayImage& a, const GrayImage& b, const SequenceSpec& spec) {
  spec.validate();
  InstanceSequence seq;
  seq.spec = spec;
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    seq.frames[t] = alpha_blend(a, b, spec.nominal[t]);
  }
  return seq;
}

ClassPair class_pair_of(std::string_view sequence_id) {
  const auto slash = sequence_id.find('/');
  if (slash == std::string_view::npos || slash + 1 >= sequence_id.size()) {
    throw Error(ErrorCode::ParseError, "sequence id '" + std::string(sequence_id) + "' is not of the form A-B/...");
  }
  return ClassPair::from_key(sequence_id.substr(0, slash));
}

std::string frame_id(const std::string& sequence_id, int t) {
  return sequence_id + "/frame_" + std::to_string(t);
}

void write_sequence(const fs::path& dir, const InstanceSequence& seq) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    write_gray_png(dir / ("frame_" + std::to_string(t) + ".png"), seq.frames[t], 16);
  }
  write_json_file(dir / "sequence.json", to_json(seq.spec));
}

SequenceSpec read_sequence_spec(const fs::path& dir) {
  return sequence_spec_from_json(read_json_file(dir / "sequence.json"));
}

InstanceSequence read_sequence(const fs::path& dir) {
  InstanceSequence seq;
  seq.spec = read_sequence_spec(dir);
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    seq.frames[t] = read_gray_png(dir / ("frame_" + std::to_string(t) + ".png"));
    if (!seq.frames[t].same_shape(seq.frames[0])) {
      throw Error(ErrorCode::MalformedImage, dir.string() + ": frames differ in size");
    }
  }
  return seq;
}

std::vector<fs::path> find_sequences(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::IoError, "not a directory: " + root.string());
  }
  std::vector<std::pair<std::string, fs::path>> found;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "sequence.json") {
      const auto dir = entry.path().parent_path();
      found.emplace_back(read_sequence_spec(dir).sequence_id(), dir);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> dirs;
  for (auto& [id, dir] : found) dirs.push_back(std::move(dir));
  return dirs;
}

}  // namespace psyscale
