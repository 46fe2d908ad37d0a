#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psyscale {

struct Embedding {
  std::string image_id;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

/// Euclidean distance. Throws MalformedEmbedding on a dimension mismatch.
double l2_distance(std::span<const double> x, std::span<const double> y);
double l2_distance(const Embedding& x, const Embedding& y);

using Manifest = std::map<std::string, Embedding>;

/// One manifest record, {"image_id": ..., "dim": N, "values": [...]}, with each
/// value written as the shortest decimal that reads back as the same float.
std::string to_manifest_line(const Embedding& e);

/// Parses a JSONL manifest. Blank lines and lines starting with '#' are
/// skipped. Values are rounded to float on load so a manifest written by
/// write_manifest reads back identically. Errors: ParseError (with line
/// number), DuplicateId, DimMismatch, MalformedEmbedding (dim field disagrees
/// with the value count, or a non-finite value).
Manifest parse_manifest(std::string_view text, const std::string& source = "manifest");
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, std::span<const Embedding> embeddings);

}  // namespace psyscale
