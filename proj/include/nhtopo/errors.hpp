#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhtopo {

enum class ErrorKind {
  // input validation
  BadInput,
  BadSize,
  NotUnitary,
  DivByZero,
  UnknownFigure,
  // numerical failures
  NonConvergence,
  DefectiveAtTolerance,
  PathHitsEP,
  AmbiguousMatch,
  ReferenceOnSpectrum,
  BandsCollide,
  UnitarityLoss,
  BandNotClosed,
  DegenerateCrossing,
  EpOnBoundary,
  NoEp,
  MultipleEps,
  PolishDiverged,
  ProbesDisagree,
  NotDegenerate,
  FitRejected,
  ContinuationStalled,
  StepUnstable,
  ResolutionTooCoarse,
};

std::string_view to_string(ErrorKind kind);

/// True for errors caused by bad input rather than by a numerical failure.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhtopo
