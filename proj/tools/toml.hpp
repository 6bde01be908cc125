#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace annopipe::tomlcfg {

/// Reads the TOML subset used by annopipe.toml into a JSON object:
///   - `# comments`
///   - `[table]` headers (one level; dotted keys inside a table allowed as
///     plain keys, not nested)
///   - `key = value` with bare keys
///   - values: basic "strings" (with \\ \" \n \t \r \uXXXX escapes),
///     integers, floats, booleans, and single-line arrays of those
/// Dates, inline tables, arrays-of-tables and multi-line strings are out of
/// scope; lines using them are reported as errors with their line number.
nlohmann::json parse_toml(const std::string& content);
nlohmann::json read_toml(const std::filesystem::path& path);

}  // namespace annopipe::tomlcfg
