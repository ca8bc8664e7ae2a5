#include "persuade/error.hpp"

namespace persuade {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "io";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Transport: return "transport";
    case ErrorCode::Auth: return "auth";
    case ErrorCode::Refusal: return "refusal";
    case ErrorCode::AmbiguousVerdict: return "ambiguous_verdict";
    case ErrorCode::InsufficientPool: return "insufficient_pool";
    case ErrorCode::DanglingReference: return "dangling_reference";
    case ErrorCode::UnknownAdvocate: return "unknown_advocate";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::DegenerateTable: return "degenerate_table";
    case ErrorCode::MissingCondition: return "missing_condition";
    case ErrorCode::MissingJurisdiction: return "missing_jurisdiction";
    case ErrorCode::WrongLedgerKind: return "wrong_ledger_kind";
    case ErrorCode::State: return "state";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace persuade
