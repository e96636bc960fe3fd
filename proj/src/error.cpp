#include "myriad/error.hpp"

namespace myriad {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidNu: return "InvalidNu";
    case Errc::NotUnitVector: return "NotUnitVector";
    case Errc::AssumptionViolation: return "AssumptionViolation";
    case Errc::DegenerateInit: return "DegenerateInit";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::ZeroSample: return "ZeroSample";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::TooSmall: return "TooSmall";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::IoFailure: return "IoFailure";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::InsufficientCandidates: return "InsufficientCandidates";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace myriad
