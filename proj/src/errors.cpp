#include "hfeq/errors.hpp"

namespace hfeq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::resolution: return "resolution-error";
    case ErrorKind::truncation: return "truncation-error";
    case ErrorKind::numeric: return "numeric-error";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::range: return "range-error";
    case ErrorKind::precondition: return "precondition-error";
    case ErrorKind::config: return "config-error";
  }
  return "error";
}

void throw_error(ErrorKind kind, const std::string& what) {
  switch (kind) {
    case ErrorKind::invalid_argument: throw InvalidArgument(what);
    case ErrorKind::resolution: throw ResolutionError(what);
    case ErrorKind::truncation: throw TruncationError(what);
    case ErrorKind::numeric: throw NumericError(what);
    case ErrorKind::degenerate_input: throw DegenerateInput(what);
    case ErrorKind::out_of_range: throw OutOfRange(what);
    case ErrorKind::range: throw RangeError(what);
    case ErrorKind::precondition: throw PreconditionError(what);
    case ErrorKind::config: throw ConfigError(what);
  }
  throw Error(kind, what);
}

}  // namespace hfeq
