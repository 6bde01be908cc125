#include "annopipe/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <vector>

#include "annopipe/error.hpp"

namespace annopipe {

namespace {

std::string to_hex(const unsigned char* digest, unsigned int len) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0f]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    fail(Errc::io, "sha256 digest failed");
  }
  return to_hex(digest.data(), len);
}

std::string sha256_hex16(std::string_view data) {
  return sha256_hex(data).substr(0, 16);
}

std::string sha256_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open file for hashing: " + path);

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) fail(Errc::io, "sha256 context allocation failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);

  std::vector<char> buf(1 << 16);
  while (in.good()) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto n = in.gcount();
    if (n > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<size_t>(n));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  return to_hex(digest.data(), len);
}

}  // namespace annopipe
