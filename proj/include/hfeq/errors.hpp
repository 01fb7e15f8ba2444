#pragma once

#include <stdexcept>
#include <string>

namespace hfeq {

enum class ErrorKind {
  invalid_argument,
  resolution,
  truncation,
  numeric,
  degenerate_input,
  out_of_range,
  range,
  precondition,
  config,
};

const char* to_string(ErrorKind kind);

// Base of everything the library throws on a contract violation.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define HFEQ_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

HFEQ_DEFINE_ERROR(InvalidArgument, invalid_argument)
HFEQ_DEFINE_ERROR(ResolutionError, resolution)
HFEQ_DEFINE_ERROR(TruncationError, truncation)
HFEQ_DEFINE_ERROR(NumericError, numeric)
HFEQ_DEFINE_ERROR(DegenerateInput, degenerate_input)
HFEQ_DEFINE_ERROR(OutOfRange, out_of_range)
HFEQ_DEFINE_ERROR(RangeError, range)
HFEQ_DEFINE_ERROR(PreconditionError, precondition)
HFEQ_DEFINE_ERROR(ConfigError, config)

#undef HFEQ_DEFINE_ERROR

// Throws the concrete subclass for kind.
[[noreturn]] void throw_error(ErrorKind kind, const std::string& what);

}  // namespace hfeq
