#pragma once

#include <stdexcept>
#include <string>

namespace ub0 {

// Every failure the library can raise, named after what went wrong.
// The CLI maps each kind to one of three exit-code buckets (see bucket_of).
enum class ErrKind {
  // invalid input (exit 2)
  NotPrime,
  SyntaxError,
  InconsistentPresentation,
  UnknownBuiltin,
  NotAssociative,
  NotNilpotent,
  FieldMismatch,
  NotASubfield,
  DegreeOutOfRange,
  DivisionByZero,
  IllDefinedMap,
  InfiniteGroup,
  BadArgument,
  // resource guard tripped (exit 3)
  OrderGuardExceeded,
  GeneratorGuardExceeded,
  ProfileGuardExceeded,
  OracleGuardExceeded,
  // cross-validation failure; indicates a bug, not bad input (exit 4)
  CollectionDiverged,
  NonIntegralRatio,
  InternalInconsistency,
};

enum class ErrBucket { invalid_input = 2, guard = 3, internal = 4 };

inline ErrBucket bucket_of(ErrKind k) {
  switch (k) {
    case ErrKind::OrderGuardExceeded:
    case ErrKind::GeneratorGuardExceeded:
    case ErrKind::ProfileGuardExceeded:
    case ErrKind::OracleGuardExceeded:
      return ErrBucket::guard;
    case ErrKind::CollectionDiverged:
    case ErrKind::NonIntegralRatio:
    case ErrKind::InternalInconsistency:
      return ErrBucket::internal;
    default:
      return ErrBucket::invalid_input;
  }
}

inline const char* kind_name(ErrKind k) {
  switch (k) {
    case ErrKind::NotPrime: return "NotPrime";
    case ErrKind::SyntaxError: return "SyntaxError";
    case ErrKind::InconsistentPresentation: return "InconsistentPresentation";
    case ErrKind::UnknownBuiltin: return "UnknownBuiltin";
    case ErrKind::NotAssociative: return "NotAssociative";
    case ErrKind::NotNilpotent: return "NotNilpotent";
    case ErrKind::FieldMismatch: return "FieldMismatch";
    case ErrKind::NotASubfield: return "NotASubfield";
    case ErrKind::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrKind::DivisionByZero: return "DivisionByZero";
    case ErrKind::IllDefinedMap: return "IllDefinedMap";
    case ErrKind::InfiniteGroup: return "InfiniteGroup";
    case ErrKind::BadArgument: return "BadArgument";
    case ErrKind::OrderGuardExceeded: return "OrderGuardExceeded";
    case ErrKind::GeneratorGuardExceeded: return "GeneratorGuardExceeded";
    case ErrKind::ProfileGuardExceeded: return "ProfileGuardExceeded";
    case ErrKind::OracleGuardExceeded: return "OracleGuardExceeded";
    case ErrKind::CollectionDiverged: return "CollectionDiverged";
    case ErrKind::NonIntegralRatio: return "NonIntegralRatio";
    case ErrKind::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg, int line = -1, int col = -1)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + msg),
        kind_(kind), line_(line), col_(col) {}

  ErrKind kind() const noexcept { return kind_; }
  ErrBucket bucket() const noexcept { return bucket_of(kind_); }
  // source position for SyntaxError, -1 otherwise
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  ErrKind kind_;
  int line_, col_;
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg) { throw Error(k, msg); }

[[noreturn]] inline void fail_syntax(const std::string& msg, int line, int col) {
  throw Error(ErrKind::SyntaxError,
              msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")",
              line, col);
}

}  // namespace ub0
