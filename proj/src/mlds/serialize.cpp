#include "psyscale/mlds/serialize.hpp"

#include <fstream>

#include "psyscale/error.hpp"

namespace psyscale {

namespace {

const Json& require(const Json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw Error(ErrorCode::MalformedResponse, std::string("missing key '") + key + "'");
  }
  return obj[key];
}

}  // namespace

std::string to_jsonl(const TrialResponse& r) {
  Json j;
  j["sequence_id"] = r.sequence_id;
  j["class_pair"] = Json::array({r.class_pair.first, r.class_pair.second});
  j["quadruple"] = Json::array({r.quadruple.i, r.quadruple.j, r.quadruple.k, r.quadruple.l});
  j["choice"] = to_string(r.choice);
  j["observer_id"] = r.observer_id;
  j["presentation_seed"] = r.presentation_seed;
  j["timestamp"] = r.timestamp_ms;
  return j.dump();
}

TrialResponse parse_response_line(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedResponse, "response is not an object");

  TrialResponse r;
  try {
    r.sequence_id = require(j, "sequence_id").get<std::string>();
    const auto& cp = require(j, "class_pair");
    if (!cp.is_array() || cp.size() != 2) {
      throw Error(ErrorCode::MalformedResponse, "class_pair must be [A, B]");
    }
    r.class_pair = {cp[0].get<std::string>(), cp[1].get<std::string>()};
    const auto& q = require(j, "quadruple");
    if (!q.is_array() || q.size() != 4) {
      throw Error(ErrorCode::MalformedResponse, "quadruple must have four indices");
    }
    r.quadruple = {q[0].get<int>(), q[1].get<int>(), q[2].get<int>(), q[3].get<int>()};
    const auto choice = parse_choice(require(j, "choice").get<std::string>());
    if (!choice) throw Error(ErrorCode::MalformedResponse, "unknown choice");
    r.choice = *choice;
    r.observer_id = require(j, "observer_id").get<std::string>();
    r.presentation_seed = require(j, "presentation_seed").get<std::uint64_t>();
    r.timestamp_ms = require(j, "timestamp").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, e.what());
  }
  if (!r.quadruple.in_range()) {
    throw Error(ErrorCode::MalformedResponse, "quadruple index outside 0..6");
  }
  if (!r.quadruple.is_canonical()) {
    throw Error(ErrorCode::MalformedResponse, "quadruple is not canonical (i<j<=k<l)");
  }
  return r;
}

std::vector<TrialResponse> read_responses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<TrialResponse> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_response_line(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_responses(const std::filesystem::path& path, std::span<const TrialResponse> responses) {
  std::string text;
  for (const auto& r : responses) {
    text += to_jsonl(r);
    text += '\n';
  }
  write_text_file(path, text);
}

Json to_json(const PerceptualScale& scale) {
  Json j;
  j["values"] = scale.values();
  j["noise_sigma"] = scale.noise_sigma();
  j["n_responses"] = scale.n_responses();
  return j;
}

PerceptualScale scale_from_json(const Json& j) {
  try {
    const auto v = j.at("values").get<std::vector<double>>();
    if (v.size() != kSequenceLength) {
      throw Error(ErrorCode::ParseError, "scale needs 7 values");
    }
    std::array<double, kSequenceLength> values{};
    std::copy(v.begin(), v.end(), values.begin());
    return PerceptualScale(values, j.at("noise_sigma").get<double>(),
                           j.value("n_responses", std::size_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scale: ") + e.what());
  }
}

Json to_json(const FitResult& fit) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["scale"] = to_json(fit.scale);
  j["log_likelihood"] = fit.log_likelihood;
  j["converged"] = fit.converged;
  j["iterations_used"] = fit.iterations_used;
  return j;
}

FitResult fit_result_from_json(const Json& j) {
  check_schema_version(j, "fit result");
  try {
    return FitResult{scale_from_json(j.at("scale")), j.at("log_likelihood").get<double>(),
                     j.at("converged").get<bool>(), j.at("iterations_used").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("fit result: ") + e.what());
  }
}

Json to_json(const FitSet& set) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "fits";
  j["observer_id"] = set.observer_id;
  Json fits = Json::array();
  for (const auto& [pair, fit] : set.fits) {
    Json entry;
    entry["class_pair"] = pair.key();
    entry["fit"] = to_json(fit);
    fits.push_back(std::move(entry));
  }
  j["fits"] = std::move(fits);
  return j;
}

FitSet fit_set_from_json(const Json& j) {
  check_schema_version(j, "fit set");
  FitSet set;
  try {
    set.observer_id = j.at("observer_id").get<std::string>();
    for (const auto& entry : j.at("fits")) {
      set.fits.emplace_back(ClassPair::from_key(entry.at("class_pair").get<std::string>()),
                            fit_result_from_json(entry.at("fit")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("fit set: ") + e.what());
  }
  return set;
}

}  // namespace psyscale
