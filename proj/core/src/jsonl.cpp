#include "annopipe/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "annopipe/error.hpp"

namespace annopipe {

namespace fs = std::filesystem;

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open JSONL file: " + path.string());
  std::vector<json> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      fail(Errc::parse, path.string() + ":" + std::to_string(lineno) +
                            ": invalid JSON line: " + e.what());
    }
  }
  return out;
}

void append_jsonl(const fs::path& path, const json& value) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) fail(Errc::io, "cannot append to JSONL file: " + path.string());
  out << value.dump() << '\n';
  out.flush();
  if (!out) fail(Errc::io, "write failure on JSONL file: " + path.string());
}

void write_jsonl(const fs::path& path, const std::vector<json>& values) {
  std::ostringstream body;
  for (const auto& v : values) body << v.dump() << '\n';
  atomic_write_file(path, body.str());
}

void atomic_write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot open for write: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(Errc::io, "write failure: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open file: " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace annopipe
