#ifndef REGSEQ_ERRORS_HPP
#define REGSEQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace regseq {

// Exit-code taxonomy shared by the library and the CLI:
//   0 success with certificate, 1 usage error, 2 certified negative,
//   3 precision cap exceeded, 4 budget or escalation exhausted.
enum class ErrorCode : int {
  usage = 1,
  certified_negative = 2,
  precision_cap = 3,
  exhausted = 4,
  internal = 70,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string kind, const std::string& what)
      : std::runtime_error(what), code_(code), kind_(std::move(kind)) {}
  ErrorCode code() const noexcept { return code_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorCode code_;
  std::string kind_;
};

// A value sits within 2^-cap of a decision boundary and the exact fallback
// paths do not apply. Signals a pathological request, never silent rounding.
class PrecisionCapExceeded : public Error {
 public:
  explicit PrecisionCapExceeded(const std::string& what)
      : Error(ErrorCode::precision_cap, "precision-cap-exceeded", what) {}
};

// The spec's symbolic metadata cannot certify the monotonicity an operation
// relies on (derivative inversion, second-derivative thresholds).
class NotMonotone : public Error {
 public:
  explicit NotMonotone(const std::string& what)
      : Error(ErrorCode::usage, "not-monotone", what) {}
};

// A certified stage check failed for the current target; the seeker catches
// this internally and escalates to the next prime / integer target.
class WindowMissed : public Error {
 public:
  explicit WindowMissed(const std::string& what)
      : Error(ErrorCode::exhausted, "window-missed", what) {}
};

class EscalationExhausted : public Error {
 public:
  explicit EscalationExhausted(const std::string& what)
      : Error(ErrorCode::exhausted, "escalation-exhausted", what) {}
};

class RoundFailed : public Error {
 public:
  explicit RoundFailed(const std::string& what)
      : Error(ErrorCode::exhausted, "round-failed", what) {}
};

class RejectedWithoutConditions : public Error {
 public:
  explicit RejectedWithoutConditions(const std::string& what)
      : Error(ErrorCode::usage, "rejected-without-conditions", what) {}
};

class IntervalTooLong : public Error {
 public:
  explicit IntervalTooLong(const std::string& what)
      : Error(ErrorCode::usage, "interval-too-long", what) {}
};

// A machine-verified theorem consequence failed to hold. Indicates an
// implementation bug, never a property of the input; callers must not
// swallow it.
class InternalContradiction : public Error {
 public:
  explicit InternalContradiction(const std::string& what)
      : Error(ErrorCode::internal, "internal-contradiction", what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCode::usage, "parse-error", what) {}
};

class BadArgument : public Error {
 public:
  explicit BadArgument(const std::string& what)
      : Error(ErrorCode::usage, "bad-argument", what) {}
};

}  // namespace regseq

#endif  // REGSEQ_ERRORS_HPP
