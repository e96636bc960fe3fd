#pragma once

#include <stdexcept>
#include <string>

namespace myriad {

enum class Errc {
  NotPositiveDefinite,
  DimensionMismatch,
  InvalidArgument,
  InvalidNu,
  NotUnitVector,
  AssumptionViolation,
  DegenerateInit,
  DegenerateData,
  ZeroSample,
  ShapeMismatch,
  TooSmall,
  MalformedHeader,
  IoFailure,
  KindMismatch,
  InsufficientCandidates,
  InvalidConfig,
};

const char* to_string(Errc code) noexcept;

/// Library-wide exception. Every failure the toolkit signals carries one of
/// the Errc codes so callers (the CLI in particular) can map it to an exit
/// status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace myriad
