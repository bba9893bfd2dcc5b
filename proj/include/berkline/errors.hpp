#pragma once

#include <stdexcept>
#include <string>

namespace berkline {

// Failure codes shared across the library. Every throwing operation documents
// which of these it can raise.
enum class Errc {
  ZeroPolynomial,
  NoConvergence,
  ZeroDenominator,
  SyntaxError,
  RamificationBound,
  DivisionByZeroSeries,
  PrecisionExhausted,
  PrecisionIncrease,
  DegreeCapExceeded,
  NotBicritical,
  SamePoint,
  InsufficientPrecision,
  NewtonDiverged,
  NotRepelling,
  MembershipUndecidable,
  HoleProximity,
  NoSolution,
  Degenerate,
  InvalidArgument,
  Overflow,
};

const char* errcName(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errcName(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace berkline
