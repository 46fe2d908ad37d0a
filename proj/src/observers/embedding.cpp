#include "psyscale/observers/embedding.hpp"

#include <charconv>
#include <cmath>

#include "psyscale/error.hpp"
#include "psyscale/json.hpp"

namespace psyscale {

double l2_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::MalformedEmbedding, "embedding dimensions differ: " +
                                                   std::to_string(x.size()) + " vs " +
                                                   std::to_string(y.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double l2_distance(const Embedding& x, const Embedding& y) { return l2_distance(x.values, y.values); }

std::string to_manifest_line(const Embedding& e) {
  // Built by hand: the value list must use float-shortest literals, which a
  // double-based JSON serializer would not produce.
  std::string line = "{\"image_id\": " + Json(e.image_id).dump() +
                     ", \"dim\": " + std::to_string(e.dim()) + ", \"values\": [";
  char buf[32];
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    const auto f = static_cast<float>(e.values[i]);
    if (!std::isfinite(f)) throw Error(ErrorCode::MalformedEmbedding, e.image_id + ": non-finite value");
    const auto res = std::to_chars(buf, buf + sizeof buf, f);
    if (i > 0) line += ", ";
    line.append(buf, res.ptr);
  }
  line += "]}";
  return line;
}

Manifest parse_manifest(std::string_view text, const std::string& source) {
  Manifest out;
  std::size_t expected_dim = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;

    const auto where = source + ":" + std::to_string(line_no);
    Embedding e;
    std::size_t dim = 0;
    try {
      const auto j = Json::parse(line);
      e.image_id = j.at("image_id").get<std::string>();
      dim = j.at("dim").get<std::size_t>();
      const auto& values = j.at("values");
      if (!values.is_array()) throw Error(ErrorCode::ParseError, where + ": values must be an array");
      e.values.reserve(values.size());
      for (const auto& v : values) {
        if (!v.is_number()) throw Error(ErrorCode::ParseError, where + ": non-numeric value");
        e.values.push_back(static_cast<double>(static_cast<float>(v.get<double>())));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::ParseError, where + ": " + ex.what());
    }
    if (e.image_id.empty()) throw Error(ErrorCode::ParseError, where + ": empty image_id");
    if (dim == 0 || dim != e.values.size()) {
      throw Error(ErrorCode::MalformedEmbedding, where + ": dim does not match the value count");
    }
    for (double v : e.values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::MalformedEmbedding, where + ": non-finite value");
    }
    if (out.empty()) {
      expected_dim = dim;
    } else if (dim != expected_dim) {
      throw Error(ErrorCode::DimMismatch, where + ": dim " + std::to_string(dim) + " but manifest uses " +
                                              std::to_string(expected_dim));
    }
    if (out.contains(e.image_id)) {
      throw Error(ErrorCode::DuplicateId, where + ": duplicate image_id '" + e.image_id + "'");
    }
    auto id = e.image_id;
    out.emplace(std::move(id), std::move(e));
  }
  return out;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path), path.string());
}

void write_manifest(const std::filesystem::path& path, std::span<const Embedding> embeddings) {
  std::string text;
  for (const auto& e : embeddings) text += to_manifest_line(e) + "\n";
  write_text_file(path, text);
}

}  // namespace psyscale
