#include "annopipe/clock.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>

namespace annopipe {

std::string now_utc_iso8601() {
  if (const char* fixed = std::getenv("ANNOPIPE_FIXED_TIME");
      fixed != nullptr && *fixed != '\0') {
    return fixed;
  }
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

bool is_iso8601_utc(const std::string& value) {
  if (value.size() != 20) return false;
  static const char* pattern = "dddd-dd-ddTdd:dd:ddZ";
  for (size_t i = 0; i < value.size(); ++i) {
    const char p = pattern[i];
    const char c = value[i];
    if (p == 'd') {
      if (std::isdigit(static_cast<unsigned char>(c)) == 0) return false;
    } else if (c != p) {
      return false;
    }
  }
  return true;
}

}  // namespace annopipe
