#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace annopipe {

/// RFC-4180-style CSV: comma separated, double-quote escaping ("" inside a
/// quoted field), quoted fields may contain commas and newlines, rows end
/// with LF or CRLF. The first row is a header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name, or -1.
  int column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& content);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_escape(const std::string& field);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace annopipe
