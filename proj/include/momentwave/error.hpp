#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace momentwave {

enum class ErrorKind {
  domain,
  frame,
  closure,
  degenerate,
  sampling,
  hyperbolicity,
  nonreal,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace momentwave
