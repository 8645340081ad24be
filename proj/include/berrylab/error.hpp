#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace berrylab {

enum class ErrorKind {
  precondition,
  model_evaluation,
  boundary_instability,
  degenerate_scaling,
  moment_overflow,
  exponent_overflow,
  empty_sample,
  invalid_sample,
  insufficient_sample,
  degenerate_bandwidth,
  log_domain,
  decomposition,
  insufficient_probe,
  parse,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorKind::precondition, message);
}

}  // namespace berrylab
