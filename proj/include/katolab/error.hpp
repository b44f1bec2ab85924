#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace katolab {

enum class Errc {
  NotHermitian,
  NotPSD,
  EigensolverFailure,
  FunctionUndefinedAtSpectrum,
  SingularResolvent,
  IterationLimit,
  DimMismatch,
  BadProjection,
  MissingProjection,
  SchemeMismatch,
  SingularInverse,
  InvalidArgument,
  KappaExceedsOne,
  PoleAtBoundary,
  BoundaryACUnsupported,
  BetaDiverges,
  BudgetExceeded,
  PotentialSingularOnGrid,
  ConfigParse,
  SchemeRejected,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure in the library is reported through this one exception type;
/// `code()` identifies the failure class, `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);
  Error(Errc code, const std::string& detail, double value);

  Errc code() const noexcept { return code_; }

  /// Offending scalar when one exists (an eigenvalue, a pole location, ...).
  std::optional<double> value() const noexcept { return value_; }

 private:
  Errc code_;
  std::optional<double> value_;
};

}  // namespace katolab
