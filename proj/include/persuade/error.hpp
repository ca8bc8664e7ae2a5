#pragma once

#include <stdexcept>
#include <string>

namespace persuade {

// One code per failure class named in the module contracts. The C API maps
// these 1:1 onto persuade_status values.
enum class ErrorCode {
  Io,
  Schema,
  Validation,
  Domain,
  Transport,
  Auth,
  Refusal,
  AmbiguousVerdict,
  InsufficientPool,
  DanglingReference,
  UnknownAdvocate,
  EmptyInput,
  DegenerateTable,
  MissingCondition,
  MissingJurisdiction,
  WrongLedgerKind,
  State,
  Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace persuade
