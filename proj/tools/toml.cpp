#include "toml.hpp"

#include <cctype>
#include <sstream>

#include "annopipe/error.hpp"
#include "annopipe/jsonl.hpp"

namespace annopipe::tomlcfg {

using nlohmann::json;

namespace {

[[noreturn]] void bad(size_t lineno, const std::string& what) {
  fail(Errc::config, "annopipe.toml:" + std::to_string(lineno) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

struct Cursor {
  std::string_view text;
  size_t pos = 0;
  size_t lineno = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
};

json parse_value(Cursor& c);

json parse_string(Cursor& c) {
  ++c.pos;  // opening quote
  std::string out;
  while (!c.done()) {
    const char ch = c.text[c.pos++];
    if (ch == '"') return json(out);
    if (ch == '\\') {
      if (c.done()) bad(c.lineno, "dangling escape in string");
      const char esc = c.text[c.pos++];
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'u': {
          if (c.pos + 4 > c.text.size()) bad(c.lineno, "truncated \\u escape");
          const std::string hex(c.text.substr(c.pos, 4));
          c.pos += 4;
          unsigned code = 0;
          for (const char h : hex) {
            code <<= 4;
            if (h >= '0' && h <= '9') code |= static_cast<unsigned>(h - '0');
            else if (h >= 'a' && h <= 'f') code |= static_cast<unsigned>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F') code |= static_cast<unsigned>(h - 'A' + 10);
            else bad(c.lineno, "invalid \\u escape");
          }
          // UTF-8 encode (BMP only, enough for config text).
          if (code < 0x80) {
            out.push_back(static_cast<char>(code));
          } else if (code < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (code >> 6)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
          } else {
            out.push_back(static_cast<char>(0xE0 | (code >> 12)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
          }
          break;
        }
        default:
          bad(c.lineno, std::string("unsupported escape \\") + esc);
      }
    } else if (ch == '\n') {
      bad(c.lineno, "newline inside basic string");
    } else {
      out.push_back(ch);
    }
  }
  bad(c.lineno, "unterminated string");
}

json parse_array(Cursor& c) {
  ++c.pos;  // '['
  json arr = json::array();
  for (;;) {
    c.skip_ws();
    if (c.done()) bad(c.lineno, "unterminated array");
    if (c.peek() == ']') {
      ++c.pos;
      return arr;
    }
    arr.push_back(parse_value(c));
    c.skip_ws();
    if (c.done()) bad(c.lineno, "unterminated array");
    if (c.peek() == ',') {
      ++c.pos;
      continue;
    }
    if (c.peek() == ']') {
      ++c.pos;
      return arr;
    }
    bad(c.lineno, "expected ',' or ']' in array");
  }
}

json parse_scalar_token(Cursor& c) {
  const size_t start = c.pos;
  while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
         c.peek() != ' ' && c.peek() != '\t') {
    ++c.pos;
  }
  const std::string token(c.text.substr(start, c.pos - start));
  if (token == "true") return json(true);
  if (token == "false") return json(false);
  if (token.empty()) bad(c.lineno, "empty value");

  const bool looks_float =
      token.find('.') != std::string::npos ||
      token.find('e') != std::string::npos || token.find('E') != std::string::npos;
  try {
    size_t used = 0;
    if (looks_float) {
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return json(v);
    }
    const long long v = std::stoll(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return json(v);
  } catch (const std::exception&) {
    bad(c.lineno, "unsupported value '" + token +
                      "' (strings need quotes; dates/inline tables are not "
                      "supported)");
  }
}

json parse_value(Cursor& c) {
  c.skip_ws();
  if (c.done()) bad(c.lineno, "missing value");
  const char ch = c.peek();
  if (ch == '"') return parse_string(c);
  if (ch == '[') return parse_array(c);
  return parse_scalar_token(c);
}

}  // namespace

json parse_toml(const std::string& content) {
  json root = json::object();
  json* table = &root;

  std::istringstream in(content);
  std::string raw_line;
  size_t lineno = 0;
  while (std::getline(in, raw_line)) {
    ++lineno;
    if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();
    const std::string_view line = trim(raw_line);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.size() >= 2 && line[1] == '[') {
        bad(lineno, "arrays of tables are not supported");
      }
      const auto close = line.find(']');
      if (close == std::string_view::npos) bad(lineno, "unterminated table header");
      const std::string name(trim(line.substr(1, close - 1)));
      if (name.empty()) bad(lineno, "empty table name");
      table = &root[name];
      if (table->is_null()) *table = json::object();
      continue;
    }

    const auto eq = raw_line.find('=');
    if (eq == std::string::npos) bad(lineno, "expected key = value");
    const std::string key(trim(std::string_view(raw_line).substr(0, eq)));
    if (key.empty()) bad(lineno, "empty key");
    for (const char ch : key) {
      if (std::isalnum(static_cast<unsigned char>(ch)) == 0 && ch != '_' &&
          ch != '-' && ch != '.') {
        bad(lineno, "unsupported key '" + key + "' (bare keys only)");
      }
    }

    Cursor cursor{raw_line, eq + 1, lineno};
    const json value = parse_value(cursor);
    cursor.skip_ws();
    if (!cursor.done() && cursor.peek() != '#') {
      bad(lineno, "trailing content after value");
    }
    if (table->contains(key)) bad(lineno, "duplicate key '" + key + "'");
    (*table)[key] = value;
  }
  return root;
}

json read_toml(const std::filesystem::path& path) {
  return parse_toml(read_file(path));
}

}  // namespace annopipe::tomlcfg
