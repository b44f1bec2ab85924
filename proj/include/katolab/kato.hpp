#pragma once

// Holomorphic Kato functions: functions f on the closed right half-plane with
// |f| <= 1, real on [0, inf), f(0) = 1 and f'(0) = -1.
//
// Every such function factors as
//
//   f(z) = D(z) * exp(-E(z)) * exp(-alpha z),
//   D(z) = prod_k [(z^2 - 2z Re xi_k + |xi_k|^2) / (z^2 + 2z Re xi_k + |xi_k|^2)]^{m_k},
//   E(z) = (2z/pi) * int_0^inf dnu(t) / (z^2 + t^2),
//
// with the budget alpha + kappa + beta = 1, where kappa collects the zeros and
// beta the small-x limit of the measure integral. This header provides the
// pieces, a handle over closed-form builtins, and numerical axiom checks.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace katolab::kato {

using cplx = std::complex<double>;

namespace tolerances {
inline constexpr double kKappa = 1e-12;
inline constexpr double kBudget = 1e-8;
inline constexpr double kPole = 1e-12;
inline constexpr double kBetaDivergence = 10.0;
inline constexpr double kBetaStep = 1e-10;
inline constexpr double kMomentGuard = 1e12;
}  // namespace tolerances

// ---------------------------------------------------------------------------
// Zeros

/// One zero representative xi (Re xi > 0, Im xi >= 0). The quadratic factor it
/// contributes to D also vanishes at conj(xi).
struct Zero {
  cplx xi;
  int multiplicity = 1;

  bool operator==(const Zero&) const = default;
};

class ZeroSet {
 public:
  ZeroSet() = default;

  /// Validates Re xi > 0, Im xi >= 0, multiplicity >= 1 and kappa <= 1.
  explicit ZeroSet(std::vector<Zero> zeros);

  const std::vector<Zero>& zeros() const noexcept { return zeros_; }
  bool empty() const noexcept { return zeros_.empty(); }

  bool operator==(const ZeroSet&) const = default;

 private:
  std::vector<Zero> zeros_;
};

/// kappa = 4 sum_k m_k Re(xi_k) / |xi_k|^2. Throws KappaExceedsOne above
/// 1 + 1e-12.
double kappa(std::span<const Zero> zeros);
double kappa(const ZeroSet& zeros);

/// Blaschke-type product D(z), Re z >= 0.
cplx blaschke_D(const ZeroSet& zeros, cplx z);

// ---------------------------------------------------------------------------
// Measures

struct Atom {
  double s = 0;  ///< location, > 0
  double w = 0;  ///< mass, > 0

  bool operator==(const Atom&) const = default;
};

/// Absolutely continuous density h(t) on (0, inf) with a registered id.
///
/// The only registered id with a boundary formula is "log_resolvent":
/// h(t) = scale * (k/2) ln(1 + t^2/k^2), whose exponent has the closed form
/// E(z) = scale * k * Log(1 + z/k) on the closed half-plane.
class AcWeight {
 public:
  static AcWeight log_resolvent(double k, double scale = 1.0);
  /// Arbitrary density; evaluation on Re z = 0 is refused for it.
  static AcWeight custom(std::string id, std::function<double(double)> density, double feature_scale = 1.0);

  const std::string& id() const noexcept { return id_; }
  double k() const noexcept { return k_; }
  double scale() const noexcept { return scale_; }
  double operator()(double t) const { return density_(t); }
  /// Scale of the density's own structure near t = 0 (resolution hint).
  double feature_scale() const noexcept { return feature_scale_; }

  /// Closed-form exponent contribution, when registered.
  std::optional<cplx> closed_form_exponent(cplx z) const;

  bool operator==(const AcWeight& other) const;

 private:
  std::string id_;
  double k_ = 0;
  double scale_ = 1;
  double feature_scale_ = 1;
  std::function<double(double)> density_;
};

class KatoMeasure {
 public:
  KatoMeasure() = default;

  /// Validates atoms (s > 0, w > 0; nu({0}) = 0) and the integrability of the
  /// density against 1/(1 + t^2), checked by quadrature.
  KatoMeasure(std::vector<Atom> atoms, std::optional<AcWeight> ac_weight);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::optional<AcWeight>& ac_weight() const noexcept { return ac_; }
  bool empty() const noexcept { return atoms_.empty() && !ac_; }

  /// int dnu / (1 + t^2).
  double total_moment() const noexcept { return total_moment_; }

  bool operator==(const KatoMeasure& other) const;

 private:
  std::vector<Atom> atoms_;
  std::optional<AcWeight> ac_;
  double total_moment_ = 0;
};

/// E(z) = (2z/pi) (sum_l w_l/(z^2 + s_l^2) + int h(t)/(z^2 + t^2) dt).
/// On Re z = 0: PoleAtBoundary within 1e-12 of +-i s_l; BoundaryACUnsupported
/// for a density without a closed form.
cplx measure_exponent(const KatoMeasure& measure, cplx z);

/// p(x) = (2/pi) int dnu / (x^2 + t^2) for real x > 0.
double measure_potential(const KatoMeasure& measure, double x);

/// beta = lim_{x -> 0+} p(x), from p(2^-j), j = 0..40, stopping once
/// successive values differ by less than 1e-10 and extrapolating the last
/// five values to x = 0. BetaDiverges if p exceeds 10 or the sequence does
/// not settle.
double beta(const KatoMeasure& measure);

// ---------------------------------------------------------------------------
// Canonical representation

class CanonicalKato {
 public:
  const ZeroSet& zeros() const noexcept { return zeros_; }
  const KatoMeasure& measure() const noexcept { return measure_; }
  double alpha() const noexcept { return alpha_; }
  double kappa() const noexcept { return kappa_; }
  double beta() const noexcept { return beta_; }
  /// alpha + kappa + beta; 1 for every instance from build_canonical.
  double budget() const noexcept { return alpha_ + kappa_ + beta_; }
  /// True when alpha was imposed instead of derived from the budget.
  bool alpha_forced() const noexcept { return forced_; }

  /// Bypasses the budget identity: used to probe the axiom checks with a
  /// deliberately broken representation.
  static CanonicalKato with_forced_alpha(ZeroSet zeros, KatoMeasure measure, double alpha);

  bool operator==(const CanonicalKato& other) const;

 private:
  friend CanonicalKato build_canonical(ZeroSet zeros, KatoMeasure measure);

  ZeroSet zeros_;
  KatoMeasure measure_;
  double alpha_ = 1;
  double kappa_ = 0;
  double beta_ = 0;
  bool forced_ = false;
};

/// alpha := 1 - kappa - beta (clamped to [0, 1]). KappaExceedsOne,
/// BetaDiverges, BudgetExceeded (kappa + beta > 1 + 1e-8).
CanonicalKato build_canonical(ZeroSet zeros, KatoMeasure measure);

// ---------------------------------------------------------------------------
// Function handles

struct ExpFunction {
  bool operator==(const ExpFunction&) const = default;
};
/// (1 + z/k)^{-k}
struct ResolventPower {
  int k = 1;
  bool operator==(const ResolventPower&) const = default;
};
/// One conjugate pair of zeros xi = eta + i tau with 4 eta/|xi|^2 = 1 - alpha.
struct SinglePair {
  double eta = 1;
  double alpha = 0;
  bool operator==(const SinglePair&) const = default;
};
/// exp{-z (1 - alpha) s^2 / (z^2 + s^2)} e^{-alpha z}: one atom at s.
struct AtomicExp {
  double s = 1;
  double alpha = 0;
  bool operator==(const AtomicExp&) const = default;
};

class KatoFunction {
 public:
  using Variant = std::variant<ExpFunction, ResolventPower, SinglePair, AtomicExp, CanonicalKato>;

  static KatoFunction exp();
  static KatoFunction resolvent_power(int k);
  /// Requires 0 < eta <= 4/(1 - alpha), 0 <= alpha < 1.
  static KatoFunction single_pair(double eta, double alpha);
  /// Requires s > 0, 0 <= alpha <= 1.
  static KatoFunction atomic_exp(double s, double alpha);
  static KatoFunction canonical(CanonicalKato c);

  const Variant& variant() const noexcept { return v_; }
  /// Short tag: exp, resolvent_power, single_pair, atomic_exp, canonical.
  std::string name() const;
  /// Parameter string without commas, e.g. "k=2" or "eta=1;alpha=0.5".
  std::string params() const;

  /// The zero representative of a SinglePair.
  static cplx single_pair_zero(double eta, double alpha);

  bool operator==(const KatoFunction&) const = default;

 private:
  explicit KatoFunction(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// f(z) for Re z >= 0.
cplx eval(const KatoFunction& f, cplx z);

/// Canonical form evaluation D(z) exp(-E(z)) exp(-alpha z).
cplx eval(const CanonicalKato& f, cplx z);

// ---------------------------------------------------------------------------
// Diagnostics

enum class Axiom { ValueAtZero, SlopeAtZero, RealRange, HalfPlaneBound };

char axiom_letter(Axiom a) noexcept;
std::string axiom_name(Axiom a);

struct AxiomResult {
  Axiom axiom;
  bool passed = false;
  double measured = 0;     ///< limit, slope, or worst value found
  cplx witness{};          ///< point where the worst value was observed
  std::string detail;
};

struct AxiomReport {
  std::vector<AxiomResult> results;  ///< (a)..(d) in order

  bool all_passed() const;
  const AxiomResult& at(Axiom a) const;
  /// First failing axiom, if any.
  std::optional<AxiomResult> first_failure() const;
};

/// (a) f(x) -> 1 as x -> 0 within 1e-8; (b) (f(x) - 1)/x -> -1 within 1e-6;
/// (c) 0 <= f(x) <= 1 on 200 log-spaced x in [1e-4, 1e4];
/// (d) |f(z)| <= 1 + 1e-10 on a 40 x 40 grid, Re z in [1e-3, 10] (log-spaced),
/// Im z in [-10, 10]. Never throws for evaluation failures; they become
/// report entries.
AxiomReport check_kato_axioms(const KatoFunction& f);

enum class RegularityVerdict { VanishingRatio, NonVanishing, Inconclusive };

std::string to_string(RegularityVerdict v);

struct BoundaryDiagnostic {
  std::vector<double> probe_ts;
  std::vector<double> ratios;  ///< tau(iy, t) / t per probe
  RegularityVerdict verdict = RegularityVerdict::Inconclusive;
  bool accumulating = false;   ///< inf_k |iy - xi_k| < min probe
  double nearest_zero_distance = 0;
};

/// tau(iy, t) = sum_{|iy - xi_k| <= t} m_k Re(xi_k), evaluated for each probe
/// radius; y < 0 is reflected to |y| by conjugate symmetry.
BoundaryDiagnostic boundary_regularity(const ZeroSet& zeros, double y, std::span<const double> probe_ts);

/// Polynomial extrapolation to x = 0 (Neville) through (x_i, v_i).
double extrapolate_to_zero(std::span<const double> xs, std::span<const double> values);

}  // namespace katolab::kato
