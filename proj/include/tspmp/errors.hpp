#pragma once

#include <stdexcept>
#include <string>

namespace tspmp {

enum class Err {
  EmptyScale,
  SingletonScale,
  NotInScale,
  ReversedInterval,
  NonPositiveStep,
  GridMismatch,
  NotOnGrid,
  AtScaleMax,
  NegativeRate,
  DimensionMismatch,
  NotInOmega,
  UnsupportedKind,
  NotInTarget,
  BlowUp,
  ControlOutOfOmega,
  NotRS,
  NotRD,
  AlphaNotInDenseSet,
  BetaNotInV,
  MaximizationFailed,
  TooLarge,
  NoAdmissibleControl,
  NoConvergence,
  DegenerateArgmax,
  StepTooLarge,
  NontrivialityViolation,
  NotApplicable,
  ParseError,
};

const char* err_name(Err e) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& detail)
      : std::runtime_error(std::string(err_name(code)) + ": " + detail), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace tspmp
