#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tracekit {

enum class ErrorKind {
  domain,
  parameter,
  range,
  numeric,
  resource,
  geometry,
  coverage,
  resolution,
  unsupported,
  not_strongly_increasing,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. The kind is stable and is
/// what the command line tool maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define TRACEKIT_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(Kind, message) {} \
  };

TRACEKIT_DEFINE_ERROR(DomainError, ErrorKind::domain)
TRACEKIT_DEFINE_ERROR(ParameterError, ErrorKind::parameter)
TRACEKIT_DEFINE_ERROR(RangeError, ErrorKind::range)
TRACEKIT_DEFINE_ERROR(NumericError, ErrorKind::numeric)
TRACEKIT_DEFINE_ERROR(ResourceError, ErrorKind::resource)
TRACEKIT_DEFINE_ERROR(GeometryError, ErrorKind::geometry)
TRACEKIT_DEFINE_ERROR(CoverageError, ErrorKind::coverage)
TRACEKIT_DEFINE_ERROR(ResolutionError, ErrorKind::resolution)
TRACEKIT_DEFINE_ERROR(UnsupportedError, ErrorKind::unsupported)
TRACEKIT_DEFINE_ERROR(NotStronglyIncreasingError, ErrorKind::not_strongly_increasing)

#undef TRACEKIT_DEFINE_ERROR

}  // namespace tracekit
