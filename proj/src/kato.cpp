#include "katolab/kato.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "katolab/error.hpp"
#include "katolab/quadrature.hpp"
#include "katolab/format.hpp"

namespace katolab::kato {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) { return shortest(v); }

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_half_plane(cplx z) {
  if (!finite(z)) throw Error(Errc::InvalidArgument, "evaluation point is not finite");
  if (z.real() < 0) throw Error(Errc::InvalidArgument, "evaluation point has Re z < 0: " + fmt(z.real()));
}

// int_0^inf h(t) / (z^2 + t^2) dt for Re z > 0 (or z real > 0).
cplx ac_integral(const AcWeight& weight, cplx z) {
  const double x = z.real();
  const double y = std::abs(z.imag());
  quadrature::HalfLineFeatures features;
  features.origin_scale = 1e-3 * std::min({std::abs(z), weight.feature_scale(), 1.0});
  if (y > x) {
    features.peak_location = std::sqrt(y * y - x * x);
    features.peak_width = x;
  }
  const cplx z2 = z * z;
  return quadrature::integrate_tan_mapped(
      [&](double theta) -> cplx {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return weight(std::tan(theta)) / (z2 * (c * c) + s * s);
      },
      features);
}

double ac_real_integral(const AcWeight& weight, double x) {
  quadrature::HalfLineFeatures features;
  features.origin_scale = 1e-3 * std::min({x, weight.feature_scale(), 1.0});
  const double x2 = x * x;
  return quadrature::integrate_tan_mapped(
      [&](double theta) {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return weight(std::tan(theta)) / (x2 * c * c + s * s);
      },
      features);
}

void check_atom_poles(const KatoMeasure& measure, cplx z) {
  for (const Atom& a : measure.atoms()) {
    if (std::abs(z - cplx(0, a.s)) < tolerances::kPole || std::abs(z + cplx(0, a.s)) < tolerances::kPole)
      throw Error(Errc::PoleAtBoundary, "z within 1e-12 of +-i*" + fmt(a.s), a.s);
  }
}

// Windowed Neville extrapolation of g(2^-j) toward x = 0: stops once two
// consecutive five-point estimates agree within `tol`.
struct Limit {
  double value = 0;
  bool settled = false;
};

template <typename G>
Limit dyadic_limit(G&& g, int j_first, int j_last, double tol) {
  std::vector<double> xs;
  std::vector<double> vs;
  Limit out;
  double previous = 0;
  bool have_previous = false;
  for (int j = j_first; j <= j_last; ++j) {
    const double x = std::ldexp(1.0, -j);
    xs.push_back(x);
    vs.push_back(g(x));
    if (xs.size() < 5) continue;
    const std::size_t n = xs.size();
    const double estimate = extrapolate_to_zero(std::span(xs).subspan(n - 5), std::span(vs).subspan(n - 5));
    out.value = estimate;
    if (have_previous && std::abs(estimate - previous) < tol) {
      out.settled = true;
      return out;
    }
    previous = estimate;
    have_previous = true;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Zeros

ZeroSet::ZeroSet(std::vector<Zero> zeros) : zeros_(std::move(zeros)) {
  for (const Zero& z : zeros_) {
    if (!finite(z.xi)) throw Error(Errc::InvalidArgument, "zero is not finite");
    if (!(z.xi.real() > 0)) throw Error(Errc::InvalidArgument, "zero must have Re xi > 0, got " + fmt(z.xi.real()));
    if (z.xi.imag() < 0) throw Error(Errc::InvalidArgument, "zero representative must have Im xi >= 0");
    if (z.multiplicity < 1) throw Error(Errc::InvalidArgument, "zero multiplicity must be >= 1");
  }
  kappa(zeros_);
}

double kappa(std::span<const Zero> zeros) {
  double sum = 0;
  for (const Zero& z : zeros) sum += z.multiplicity * z.xi.real() / std::norm(z.xi);
  const double k = 4 * sum;
  if (k > 1 + tolerances::kKappa) throw Error(Errc::KappaExceedsOne, "kappa = " + fmt(k) + " > 1", k);
  return k;
}

double kappa(const ZeroSet& zeros) { return kappa(std::span<const Zero>(zeros.zeros())); }

cplx blaschke_D(const ZeroSet& zeros, cplx z) {
  cplx d = 1.0;
  const cplx z2 = z * z;
  for (const Zero& zero : zeros.zeros()) {
    const double re = zero.xi.real();
    const double r2 = std::norm(zero.xi);
    const cplx factor = (z2 - 2.0 * re * z + r2) / (z2 + 2.0 * re * z + r2);
    for (int m = 0; m < zero.multiplicity; ++m) d *= factor;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Measures

AcWeight AcWeight::log_resolvent(double k, double scale) {
  if (!(k > 0) || !std::isfinite(k)) throw Error(Errc::InvalidArgument, "log_resolvent needs k > 0");
  if (!(scale >= 0) || !std::isfinite(scale)) throw Error(Errc::InvalidArgument, "log_resolvent needs scale >= 0");
  AcWeight w;
  w.id_ = "log_resolvent";
  w.k_ = k;
  w.scale_ = scale;
  w.feature_scale_ = k;
  w.density_ = [k, scale](double t) { return scale * 0.5 * k * std::log1p((t / k) * (t / k)); };
  return w;
}

AcWeight AcWeight::custom(std::string id, std::function<double(double)> density, double feature_scale) {
  if (!density) throw Error(Errc::InvalidArgument, "custom weight needs a density");
  AcWeight w;
  w.id_ = std::move(id);
  w.density_ = std::move(density);
  w.feature_scale_ = feature_scale > 0 ? feature_scale : 1.0;
  return w;
}

std::optional<cplx> AcWeight::closed_form_exponent(cplx z) const {
  if (id_ == "log_resolvent") return scale_ * k_ * std::log(1.0 + z / k_);
  return std::nullopt;
}

bool AcWeight::operator==(const AcWeight& other) const {
  // Custom densities compare by id only.
  return id_ == other.id_ && k_ == other.k_ && scale_ == other.scale_;
}

KatoMeasure::KatoMeasure(std::vector<Atom> atoms, std::optional<AcWeight> ac_weight)
    : atoms_(std::move(atoms)), ac_(std::move(ac_weight)) {
  double moment = 0;
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.s) || !std::isfinite(a.w)) throw Error(Errc::InvalidArgument, "atom is not finite");
    if (!(a.s > 0)) throw Error(Errc::InvalidArgument, "atoms must sit at s > 0 (no mass at 0)");
    if (!(a.w > 0)) throw Error(Errc::InvalidArgument, "atom masses must be > 0");
    moment += a.w / (1 + a.s * a.s);
  }
  if (ac_) {
    const double ac_moment = quadrature::integrate_tan_mapped(
        [&](double theta) { return (*ac_)(std::tan(theta)); },
        quadrature::HalfLineFeatures{1e-3 * std::min(ac_->feature_scale(), 1.0), 0, 0});
    if (!std::isfinite(ac_moment) || ac_moment < 0)
      throw Error(Errc::InvalidArgument, "density is negative or not integrable against 1/(1+t^2)");
    moment += ac_moment;
  }
  if (!(moment <= tolerances::kMomentGuard))
    throw Error(Errc::InvalidArgument, "measure moment int dnu/(1+t^2) is not finite: " + fmt(moment));
  total_moment_ = moment;
}

bool KatoMeasure::operator==(const KatoMeasure& other) const {
  return atoms_ == other.atoms_ && ac_ == other.ac_;
}

cplx measure_exponent(const KatoMeasure& measure, cplx z) {
  require_half_plane(z);
  check_atom_poles(measure, z);
  if (z == cplx(0)) return 0.0;
  const cplx z2 = z * z;
  cplx atom_sum = 0.0;
  for (const Atom& a : measure.atoms()) atom_sum += a.w / (z2 + a.s * a.s);
  cplx exponent = (2.0 / kPi) * z * atom_sum;
  if (const auto& ac = measure.ac_weight()) {
    if (z.real() == 0) {
      const auto closed = ac->closed_form_exponent(z);
      if (!closed)
        throw Error(Errc::BoundaryACUnsupported,
                    "no boundary formula registered for density '" + ac->id() + "' at z = i*" + fmt(z.imag()));
      exponent += *closed;
    } else {
      exponent += (2.0 / kPi) * z * ac_integral(*ac, z);
    }
  }
  return exponent;
}

double measure_potential(const KatoMeasure& measure, double x) {
  if (!(x > 0)) throw Error(Errc::InvalidArgument, "measure_potential needs x > 0");
  double sum = 0;
  for (const Atom& a : measure.atoms()) sum += a.w / (x * x + a.s * a.s);
  if (const auto& ac = measure.ac_weight()) sum += ac_real_integral(*ac, x);
  return (2.0 / kPi) * sum;
}

double beta(const KatoMeasure& measure) {
  if (measure.empty()) return 0.0;
  std::vector<double> xs;
  std::vector<double> ps;
  for (int j = 0; j <= 40; ++j) {
    const double x = std::ldexp(1.0, -j);
    const double p = measure_potential(measure, x);
    if (!std::isfinite(p) || p > tolerances::kBetaDivergence)
      throw Error(Errc::BetaDiverges, "p(2^-" + std::to_string(j) + ") = " + fmt(p) + " exceeds 10", p);
    xs.push_back(x);
    ps.push_back(p);
    if (j > 0 && std::abs(ps[j] - ps[j - 1]) < tolerances::kBetaStep) {
      const std::size_t n = std::min<std::size_t>(5, xs.size());
      return extrapolate_to_zero(std::span(xs).last(n), std::span(ps).last(n));
    }
  }
  throw Error(Errc::BetaDiverges, "p(2^-j) did not settle by j = 40 (last " + fmt(ps.back()) + ")", ps.back());
}

// ---------------------------------------------------------------------------
// Canonical representation

CanonicalKato CanonicalKato::with_forced_alpha(ZeroSet zeros, KatoMeasure measure, double alpha) {
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw Error(Errc::InvalidArgument, "alpha must be >= 0");
  CanonicalKato c;
  c.kappa_ = kato::kappa(zeros);
  c.beta_ = kato::beta(measure);
  c.zeros_ = std::move(zeros);
  c.measure_ = std::move(measure);
  c.alpha_ = alpha;
  c.forced_ = true;
  return c;
}

bool CanonicalKato::operator==(const CanonicalKato& other) const {
  return zeros_ == other.zeros_ && measure_ == other.measure_ && alpha_ == other.alpha_ &&
         forced_ == other.forced_;
}

CanonicalKato build_canonical(ZeroSet zeros, KatoMeasure measure) {
  const double k = kappa(zeros);
  const double b = beta(measure);
  if (k + b > 1 + tolerances::kBudget)
    throw Error(Errc::BudgetExceeded, "kappa + beta = " + fmt(k + b) + " > 1", k + b);
  CanonicalKato c;
  c.zeros_ = std::move(zeros);
  c.measure_ = std::move(measure);
  c.kappa_ = k;
  c.beta_ = b;
  c.alpha_ = std::clamp(1 - k - b, 0.0, 1.0);
  return c;
}

// ---------------------------------------------------------------------------
// Function handles

KatoFunction KatoFunction::exp() { return KatoFunction(ExpFunction{}); }

KatoFunction KatoFunction::resolvent_power(int k) {
  if (k < 1) throw Error(Errc::InvalidArgument, "resolvent power needs k >= 1");
  return KatoFunction(ResolventPower{k});
}

KatoFunction KatoFunction::single_pair(double eta, double alpha) {
  if (!(alpha >= 0 && alpha < 1)) throw Error(Errc::InvalidArgument, "single pair needs 0 <= alpha < 1");
  if (!(eta > 0 && eta <= 4 / (1 - alpha)))
    throw Error(Errc::InvalidArgument, "single pair needs 0 < eta <= 4/(1 - alpha)");
  return KatoFunction(SinglePair{eta, alpha});
}

KatoFunction KatoFunction::atomic_exp(double s, double alpha) {
  if (!(s > 0) || !std::isfinite(s)) throw Error(Errc::InvalidArgument, "atomic exp needs s > 0");
  if (!(alpha >= 0 && alpha <= 1)) throw Error(Errc::InvalidArgument, "atomic exp needs 0 <= alpha <= 1");
  return KatoFunction(AtomicExp{s, alpha});
}

KatoFunction KatoFunction::canonical(CanonicalKato c) { return KatoFunction(std::move(c)); }

cplx KatoFunction::single_pair_zero(double eta, double alpha) {
  const double r2 = 4 * eta / (1 - alpha);
  return {eta, std::sqrt(std::max(0.0, r2 - eta * eta))};
}

std::string KatoFunction::name() const {
  struct Visitor {
    std::string operator()(const ExpFunction&) const { return "exp"; }
    std::string operator()(const ResolventPower&) const { return "resolvent_power"; }
    std::string operator()(const SinglePair&) const { return "single_pair"; }
    std::string operator()(const AtomicExp&) const { return "atomic_exp"; }
    std::string operator()(const CanonicalKato&) const { return "canonical"; }
  };
  return std::visit(Visitor{}, v_);
}

std::string KatoFunction::params() const {
  struct Visitor {
    std::string operator()(const ExpFunction&) const { return ""; }
    std::string operator()(const ResolventPower& f) const { return "k=" + std::to_string(f.k); }
    std::string operator()(const SinglePair& f) const { return "eta=" + fmt(f.eta) + ";alpha=" + fmt(f.alpha); }
    std::string operator()(const AtomicExp& f) const { return "s=" + fmt(f.s) + ";alpha=" + fmt(f.alpha); }
    std::string operator()(const CanonicalKato& f) const {
      // zeros=re+im i^mult|...;atoms=s@w|...;ac=id(k=..|scale=..);alpha=..
      std::string out = "zeros=";
      for (std::size_t i = 0; i < f.zeros().zeros().size(); ++i) {
        const Zero& z = f.zeros().zeros()[i];
        out += (i ? "|" : "") + fmt(z.xi.real()) + "+" + fmt(z.xi.imag()) + "i^" + std::to_string(z.multiplicity);
      }
      out += ";atoms=";
      for (std::size_t i = 0; i < f.measure().atoms().size(); ++i) {
        const Atom& a = f.measure().atoms()[i];
        out += (i ? "|" : "") + fmt(a.s) + "@" + fmt(a.w);
      }
      out += ";ac=";
      if (const auto& ac = f.measure().ac_weight())
        out += ac->id() + "(k=" + fmt(ac->k()) + "|scale=" + fmt(ac->scale()) + ")";
      out += ";alpha=" + fmt(f.alpha());
      return out;
    }
  };
  return std::visit(Visitor{}, v_);
}

cplx eval(const CanonicalKato& f, cplx z) {
  require_half_plane(z);
  const cplx exponent = measure_exponent(f.measure(), z);
  return blaschke_D(f.zeros(), z) * std::exp(-exponent - f.alpha() * z);
}

cplx eval(const KatoFunction& f, cplx z) {
  require_half_plane(z);
  struct Visitor {
    cplx z;
    cplx operator()(const ExpFunction&) const { return std::exp(-z); }
    cplx operator()(const ResolventPower& f) const {
      const cplx base = 1.0 + z / static_cast<double>(f.k);
      cplx p = 1.0;
      for (int i = 0; i < f.k; ++i) p *= base;
      return 1.0 / p;
    }
    cplx operator()(const SinglePair& f) const {
      const double c = 4 * f.eta / (1 - f.alpha);
      const cplx z2 = z * z;
      return (z2 - 2 * f.eta * z + c) / (z2 + 2 * f.eta * z + c) * std::exp(-f.alpha * z);
    }
    cplx operator()(const AtomicExp& f) const {
      if (f.alpha < 1 &&
          (std::abs(z - cplx(0, f.s)) < tolerances::kPole || std::abs(z + cplx(0, f.s)) < tolerances::kPole))
        throw Error(Errc::PoleAtBoundary, "z within 1e-12 of +-i*" + fmt(f.s), f.s);
      const double s2 = f.s * f.s;
      return std::exp(-z * (1 - f.alpha) * s2 / (z * z + s2) - f.alpha * z);
    }
    cplx operator()(const CanonicalKato& f) const { return kato::eval(f, z); }
  };
  return std::visit(Visitor{z}, f.variant());
}

// ---------------------------------------------------------------------------
// Diagnostics

double extrapolate_to_zero(std::span<const double> xs, std::span<const double> values) {
  if (xs.size() != values.size() || xs.empty())
    throw Error(Errc::InvalidArgument, "extrapolation needs matching, non-empty samples");
  std::vector<double> p(values.begin(), values.end());
  const std::size_t n = p.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i) {
      const double xi = xs[i];
      const double xj = xs[i + level];
      p[i] = (-xj * p[i] + xi * p[i + 1]) / (xi - xj);
    }
  return p[0];
}

char axiom_letter(Axiom a) noexcept { return static_cast<char>('a' + static_cast<int>(a)); }

std::string axiom_name(Axiom a) {
  switch (a) {
    case Axiom::ValueAtZero: return "(a) f(0+) = 1";
    case Axiom::SlopeAtZero: return "(b) f'(0+) = -1";
    case Axiom::RealRange: return "(c) 0 <= f(x) <= 1 on [1e-4, 1e4]";
    case Axiom::HalfPlaneBound: return "(d) |f(z)| <= 1 on the right half-plane";
  }
  return "?";
}

bool AxiomReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.passed; });
}

const AxiomResult& AxiomReport::at(Axiom a) const {
  for (const auto& r : results)
    if (r.axiom == a) return r;
  throw Error(Errc::InvalidArgument, "axiom missing from report");
}

std::optional<AxiomResult> AxiomReport::first_failure() const {
  for (const auto& r : results)
    if (!r.passed) return r;
  return std::nullopt;
}

AxiomReport check_kato_axioms(const KatoFunction& f) {
  AxiomReport report;

  auto guarded = [&](Axiom axiom, auto&& body) {
    AxiomResult r;
    r.axiom = axiom;
    try {
      body(r);
    } catch (const Error& e) {
      r.passed = false;
      r.detail = std::string("evaluation failed: ") + e.what();
    }
    report.results.push_back(r);
  };

  guarded(Axiom::ValueAtZero, [&](AxiomResult& r) {
    const Limit lim = dyadic_limit([&](double x) { return eval(f, x).real(); }, 0, 40, 1e-12);
    r.measured = lim.value;
    r.witness = 0.0;
    r.passed = std::abs(lim.value - 1) <= 1e-8;
    r.detail = "f(0+) = " + fmt(lim.value);
  });

  guarded(Axiom::SlopeAtZero, [&](AxiomResult& r) {
    const Limit lim = dyadic_limit([&](double x) { return (eval(f, x).real() - 1) / x; }, 4, 20, 1e-9);
    r.measured = lim.value;
    r.witness = 0.0;
    r.passed = std::abs(lim.value + 1) <= 1e-6;
    r.detail = "f'(0+) = " + fmt(lim.value);
  });

  guarded(Axiom::RealRange, [&](AxiomResult& r) {
    constexpr int kPoints = 200;
    double worst = 0;
    double worst_value = 0;
    r.passed = true;
    for (int i = 0; i < kPoints; ++i) {
      const double x = std::pow(10.0, -4.0 + 8.0 * i / (kPoints - 1));
      const cplx v = eval(f, x);
      const double violation = std::max({-v.real(), v.real() - 1, std::abs(v.imag())});
      if (violation > worst || i == 0) {
        worst = violation;
        worst_value = v.real();
        r.witness = x;
      }
    }
    r.measured = worst_value;
    r.passed = worst <= 1e-12;
    r.detail = r.passed ? "values in [0, 1]" : "value " + fmt(worst_value) + " at x = " + fmt(r.witness.real());
  });

  guarded(Axiom::HalfPlaneBound, [&](AxiomResult& r) {
    constexpr int kGrid = 40;
    double worst = -1;
    for (int i = 0; i < kGrid; ++i) {
      const double x = std::pow(10.0, -3.0 + 4.0 * i / (kGrid - 1));
      for (int j = 0; j < kGrid; ++j) {
        const double y = -10.0 + 20.0 * j / (kGrid - 1);
        const double modulus = std::abs(eval(f, cplx(x, y)));
        if (!(modulus <= worst)) {
          worst = modulus;
          r.witness = cplx(x, y);
        }
      }
    }
    r.measured = worst;
    r.passed = worst <= 1 + 1e-10;
    r.detail = "max |f| = " + fmt(worst);
  });

  return report;
}

std::string to_string(RegularityVerdict v) {
  switch (v) {
    case RegularityVerdict::VanishingRatio: return "VanishingRatio";
    case RegularityVerdict::NonVanishing: return "NonVanishing";
    case RegularityVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

BoundaryDiagnostic boundary_regularity(const ZeroSet& zeros, double y, std::span<const double> probe_ts) {
  if (!std::isfinite(y)) throw Error(Errc::InvalidArgument, "boundary point must be finite");
  for (std::size_t i = 0; i < probe_ts.size(); ++i) {
    if (!(probe_ts[i] > 0) || !std::isfinite(probe_ts[i]))
      throw Error(Errc::InvalidArgument, "probe radii must be finite and positive");
    if (i > 0 && !(probe_ts[i] < probe_ts[i - 1]))
      throw Error(Errc::InvalidArgument, "probe radii must be strictly decreasing");
  }
  const cplx point(0, std::abs(y));

  BoundaryDiagnostic out;
  out.probe_ts.assign(probe_ts.begin(), probe_ts.end());
  out.nearest_zero_distance = std::numeric_limits<double>::infinity();
  for (const Zero& z : zeros.zeros())
    out.nearest_zero_distance = std::min(out.nearest_zero_distance, std::abs(point - z.xi));

  for (double t : probe_ts) {
    double tau = 0;
    for (const Zero& z : zeros.zeros())
      if (std::abs(point - z.xi) <= t) tau += z.multiplicity * z.xi.real();
    out.ratios.push_back(tau / t);
  }
  if (probe_ts.empty()) return out;
  out.accumulating = out.nearest_zero_distance < probe_ts.back();

  const std::size_t m = out.ratios.size();
  const std::size_t tail_begin = m / 2;
  const std::span<const double> tail(out.ratios.data() + tail_begin, m - tail_begin);
  const double last = out.ratios.back();
  const double tail_max = *std::max_element(tail.begin(), tail.end());
  const double tail_min = *std::min_element(tail.begin(), tail.end());
  const bool nonincreasing = std::is_sorted(tail.rbegin(), tail.rend());

  if (last == 0) {
    out.verdict = RegularityVerdict::VanishingRatio;
  } else if (nonincreasing && last <= 1e-2 * tail.front()) {
    out.verdict = RegularityVerdict::VanishingRatio;
  } else if (tail_min > 1e-12 && tail_min >= 0.1 * tail_max) {
    out.verdict = RegularityVerdict::NonVanishing;
  } else {
    out.verdict = RegularityVerdict::Inconclusive;
  }
  return out;
}

}  // namespace katolab::kato
