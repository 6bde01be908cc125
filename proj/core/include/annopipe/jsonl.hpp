#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <vector>

namespace annopipe {

using json = nlohmann::json;

/// Reads a JSONL file (one JSON value per non-empty line). Parse errors
/// report the 1-based line number.
std::vector<json> read_jsonl(const std::filesystem::path& path);

/// Appends one value as a single line, flushing before returning.
void append_jsonl(const std::filesystem::path& path, const json& value);

/// Writes all values, replacing the file. Parent directories are created.
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<json>& values);

/// Writes `content` through a temporary file and renames it into place.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

/// Reads a whole file into a string; throws Errc::io when missing.
std::string read_file(const std::filesystem::path& path);

}  // namespace annopipe
