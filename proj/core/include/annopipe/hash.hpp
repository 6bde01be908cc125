#pragma once

#include <string>
#include <string_view>

namespace annopipe {

/// SHA-256 of `data` as a 64-character lowercase hex string.
std::string sha256_hex(std::string_view data);

/// First 16 hex characters of sha256_hex, used for short content ids.
std::string sha256_hex16(std::string_view data);

/// SHA-256 of a file's bytes; throws Errc::io when unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace annopipe
