#pragma once

#include <string>

namespace annopipe {

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ". ISO-8601 timestamps order
/// lexicographically, so iteration logs can sort by the raw string.
///
/// When the environment variable ANNOPIPE_FIXED_TIME is set to such a
/// timestamp, it is returned verbatim. This freezes every timestamp the
/// toolkit emits and makes whole pipeline runs byte-reproducible.
std::string now_utc_iso8601();

/// True when the given string looks like a "YYYY-MM-DDTHH:MM:SSZ" instant.
bool is_iso8601_utc(const std::string& value);

}  // namespace annopipe
