#include "katolab/error.hpp"

namespace katolab {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotPSD: return "NotPSD";
    case Errc::EigensolverFailure: return "EigensolverFailure";
    case Errc::FunctionUndefinedAtSpectrum: return "FunctionUndefinedAtSpectrum";
    case Errc::SingularResolvent: return "SingularResolvent";
    case Errc::IterationLimit: return "IterationLimit";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::BadProjection: return "BadProjection";
    case Errc::MissingProjection: return "MissingProjection";
    case Errc::SchemeMismatch: return "SchemeMismatch";
    case Errc::SingularInverse: return "SingularInverse";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::KappaExceedsOne: return "KappaExceedsOne";
    case Errc::PoleAtBoundary: return "PoleAtBoundary";
    case Errc::BoundaryACUnsupported: return "BoundaryACUnsupported";
    case Errc::BetaDiverges: return "BetaDiverges";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::PotentialSingularOnGrid: return "PotentialSingularOnGrid";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::SchemeRejected: return "SchemeRejected";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

Error::Error(Errc code, const std::string& detail, double value)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), value_(value) {}

}  // namespace katolab
