#pragma once

#include <stdexcept>
#include <string>

namespace currents {

// Typed domain errors. The CLI maps ErrorKind to exit code 2; plain usage
// errors exit 1.
enum class ErrorKind {
  TrivialWord,
  BudgetExceeded,
  Unstable,
  DegenerateLinking,
  NotHyperbolic,
  UnsupportedGenus,
  DegenerateCoordinates,
  StructurePairUnsupported,
  EmptyFamily,
  NonFillingOnFamily,
  InvalidMarking,
  UnrealizablePattern,
  InvalidSplit,
  PropertyCheckFailed,
  NonFilling,
  MaxIterations,
  SchemaError,
  Internal,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace currents
