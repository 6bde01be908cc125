#pragma once

#include <stdexcept>
#include <string>

namespace annopipe {

/// Error categories used across the toolkit. The CLI maps them onto exit
/// codes: workflow_gate -> 2, backend* -> 3, everything else -> 1.
enum class Errc {
  config,
  validation,
  io,
  parse,
  workflow_gate,
  backend,
  backend_auth,
  backend_transient,
  undefined_metric,
  cache,
};

constexpr const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::config: return "config";
    case Errc::validation: return "validation";
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::workflow_gate: return "workflow_gate";
    case Errc::backend: return "backend";
    case Errc::backend_auth: return "backend_auth";
    case Errc::backend_transient: return "backend_transient";
    case Errc::undefined_metric: return "undefined_metric";
    case Errc::cache: return "cache";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace annopipe
