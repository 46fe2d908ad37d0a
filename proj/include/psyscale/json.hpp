#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace psyscale {

/// Insertion-ordered JSON so every document we write has a fixed key order.
using Json = nlohmann::ordered_json;

/// Reads and parses a JSON document; throws ParseError / IoError.
Json read_json_file(const std::filesystem::path& path);

/// Writes `doc` pretty-printed with a trailing newline, replacing the file
/// atomically (write to a sibling temp file, then rename).
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// Writes `text` to `path` atomically.
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

/// Requires `doc["schema_version"] == "1"`; throws ParseError otherwise.
void check_schema_version(const Json& doc, const std::string& what);

}  // namespace psyscale
