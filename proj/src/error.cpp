#include "momentwave/error.hpp"

namespace momentwave {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::frame: return "frame";
    case ErrorKind::closure: return "closure";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::hyperbolicity: return "hyperbolicity";
    case ErrorKind::nonreal: return "nonreal";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace momentwave
