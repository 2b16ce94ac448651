#include "tracekit/errors.hpp"

namespace tracekit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::range: return "range error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::resource: return "resource error";
    case ErrorKind::geometry: return "geometry error";
    case ErrorKind::coverage: return "coverage error";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::unsupported: return "unsupported input";
    case ErrorKind::not_strongly_increasing: return "not strongly increasing";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace tracekit
