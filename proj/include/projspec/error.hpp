#pragma once

#include <stdexcept>
#include <string>

namespace projspec {

enum class ErrorCode {
  InvalidArgument,
  DimMismatch,
  ParseError,
  NotNormal,
  NoConvergence,
  InterpolationFailure,
  DegenerateInput,
  NumericalAmbiguity,
  InvalidEpsilon,
  LevelTooLarge,
  EigenvalueOnContour,
  SingularResolvent,
  ContourCapturesPerturbedSpectrumBoundary,
  LineNotInSpectrum,
  NonConvergence,
  NotCommuting,
  NotInvariant,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InterpolationFailure: return "InterpolationFailure";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NumericalAmbiguity: return "NumericalAmbiguity";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::LevelTooLarge: return "LevelTooLarge";
    case ErrorCode::EigenvalueOnContour: return "EigenvalueOnContour";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::ContourCapturesPerturbedSpectrumBoundary:
      return "ContourCapturesPerturbedSpectrumBoundary";
    case ErrorCode::LineNotInSpectrum: return "LineNotInSpectrum";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::NotInvariant: return "NotInvariant";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures additionally record where in the input they happened (1-based).
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace projspec
