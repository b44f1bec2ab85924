#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "katolab/error.hpp"
#include "katolab/kato.hpp"
#include "katolab/kato_json.hpp"

using namespace katolab;
using namespace katolab::kato;

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^inf h(t) / (z^2 + t^2) dt by the substitution t = e^u and a fine
// trapezoid rule on u in [-40, 40].
cplx reference_ac_integral(const std::function<double(double)>& h, cplx z) {
  const int n = 400000;
  const double lo = -40, hi = 40;
  const double du = (hi - lo) / n;
  cplx sum = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = std::exp(lo + i * du);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * h(t) * t / (z * z + t * t);
  }
  return sum * du;
}

std::optional<Errc> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(Zeros, KappaOfSinglePair) {
  const ZeroSet zs({{cplx(8.0, 4.0), 1}});
  EXPECT_NEAR(kappa(zs), 4 * 8.0 / 80.0, 1e-15);
  const ZeroSet doubled({{cplx(8.0, 4.0), 2}});
  EXPECT_NEAR(kappa(doubled), 0.8, 1e-15);
}

TEST(Zeros, KappaExceedsOneIsRejected) {
  EXPECT_EQ(code_of([] { ZeroSet({{cplx(1.0, 0.0), 1}}); }), Errc::KappaExceedsOne);
  EXPECT_EQ(code_of([] { ZeroSet({{cplx(-1.0, 0.0), 1}}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { ZeroSet({{cplx(8.0, -1.0), 1}}); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { ZeroSet({{cplx(8.0, 1.0), 0}}); }), Errc::InvalidArgument);
}

TEST(Zeros, BlaschkeFactorVanishesAtZerosAndIsUnimodularOnAxis) {
  const ZeroSet zs({{cplx(16.0, 6.0), 1}, {cplx(24.0, 0.0), 2}});
  EXPECT_LT(std::abs(blaschke_D(zs, cplx(16.0, 6.0))), 1e-14);
  EXPECT_LT(std::abs(blaschke_D(zs, cplx(16.0, -6.0))), 1e-14);
  EXPECT_LT(std::abs(blaschke_D(zs, cplx(24.0, 0.0))), 1e-14);
  for (double y : {-20.0, -1.0, 0.0, 0.5, 3.0, 100.0}) EXPECT_NEAR(std::abs(blaschke_D(zs, cplx(0, y))), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(blaschke_D(zs, cplx(0, 0))), 1.0, 1e-15);
}

TEST(Measure, AtomExponentClosedForm) {
  const KatoMeasure m({{2.0, 0.5}, {5.0, 1.5}}, std::nullopt);
  for (cplx z : {cplx(0.3, 0.0), cplx(1.0, 4.0), cplx(0.0, 1.0)}) {
    const cplx expected = (2.0 * z / kPi) * (0.5 / (z * z + 4.0) + 1.5 / (z * z + 25.0));
    EXPECT_LT(std::abs(measure_exponent(m, z) - expected), 1e-14);
  }
}

TEST(Measure, LogResolventQuadratureAgainstReference) {
  const KatoMeasure m({}, AcWeight::log_resolvent(2.0));
  const auto h = [](double t) { return 1.0 * std::log1p(t * t / 4.0); };  // (k/2) ln(1 + t^2/k^2), k = 2
  for (cplx z : {cplx(1.0, 2.0), cplx(0.05, 3.0), cplx(5.0, 0.0)}) {
    const cplx expected = (2.0 * z / kPi) * reference_ac_integral(h, z);
    EXPECT_LT(std::abs(measure_exponent(m, z) - expected), 1e-8 * std::abs(expected)) << z;
  }
}

TEST(Measure, LogResolventClosedFormOnInterior) {
  for (double k : {1.0, 3.0}) {
    const KatoMeasure m({}, AcWeight::log_resolvent(k));
    for (cplx z : {cplx(1e-3, 0.5), cplx(0.2, 7.0), cplx(30.0, -2.0)}) {
      const cplx closed = k * std::log(1.0 + z / k);
      EXPECT_LT(std::abs(measure_exponent(m, z) - closed), 1e-11 * std::max(1.0, std::abs(closed))) << z;
    }
  }
}

TEST(Measure, BoundaryBehaviour) {
  const KatoMeasure atoms({{2.0, 0.5}}, std::nullopt);
  EXPECT_EQ(code_of([&] { measure_exponent(atoms, cplx(0.0, 2.0)); }), Errc::PoleAtBoundary);
  EXPECT_EQ(code_of([&] { measure_exponent(atoms, cplx(0.0, -2.0)); }), Errc::PoleAtBoundary);
  EXPECT_EQ(code_of([&] { measure_exponent(atoms, cplx(-0.1, 0.0)); }), Errc::InvalidArgument);
  const KatoMeasure custom({}, AcWeight::custom("flat", [](double t) { return t < 1 ? 1.0 : 0.0; }));
  EXPECT_EQ(code_of([&] { measure_exponent(custom, cplx(0.0, 1.0)); }), Errc::BoundaryACUnsupported);
  EXPECT_EQ(measure_exponent(atoms, cplx(0.0, 0.0)), cplx(0.0));
}

TEST(Measure, RejectsInvalidAtoms) {
  EXPECT_EQ(code_of([] { KatoMeasure({{0.0, 1.0}}, std::nullopt); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { KatoMeasure({{1.0, -1.0}}, std::nullopt); }), Errc::InvalidArgument);
}

TEST(Beta, AtomsAreTheirPotentialAtZero) {
  const KatoMeasure m({{2.0, 0.5}, {0.5, 0.01}}, std::nullopt);
  const double expected = (2.0 / kPi) * (0.5 / 4.0 + 0.01 / 0.25);
  EXPECT_NEAR(beta(m), expected, 1e-10);
}

TEST(Beta, LogResolventWeightHasBetaEqualToScale) {
  EXPECT_NEAR(beta(KatoMeasure({}, AcWeight::log_resolvent(1.0))), 1.0, 1e-8);
  EXPECT_NEAR(beta(KatoMeasure({}, AcWeight::log_resolvent(3.0, 0.25))), 0.25, 1e-8);
}

TEST(Beta, DivergentWeightIsReported) {
  // h(t) = t^{-1/2} near 0 makes p(x) grow like x^{-1/2}.
  const KatoMeasure m({}, AcWeight::custom("sqrt_singular", [](double t) { return t < 1 ? 1 / std::sqrt(t) : 0.0; },
                                            1e-12));
  EXPECT_EQ(code_of([&] { beta(m); }), Errc::BetaDiverges);
}

TEST(Canonical, BudgetClosesToOne) {
  const ZeroSet zs({{cplx(8.0, 4.0), 1}});
  const KatoMeasure m({{2.0, 0.5}}, AcWeight::log_resolvent(2.0, 0.25));
  const CanonicalKato c = build_canonical(zs, m);
  EXPECT_NEAR(c.kappa(), 0.4, 1e-15);
  EXPECT_NEAR(c.beta(), 0.25 + (2.0 / kPi) * 0.5 / 4.0, 1e-8);
  EXPECT_NEAR(c.alpha() + c.kappa() + c.beta(), 1.0, 1e-12);
  EXPECT_FALSE(c.alpha_forced());
}

TEST(Canonical, BudgetExceededIsRejected) {
  const ZeroSet zs({{cplx(4.0, 2.0), 1}});
  const KatoMeasure m({{2.0, 0.5}}, AcWeight::log_resolvent(2.0, 0.25));
  EXPECT_EQ(code_of([&] { build_canonical(zs, m); }), Errc::BudgetExceeded);
}

TEST(Canonical, LogResolventReproducesResolventPower) {
  for (int k : {1, 3}) {
    const CanonicalKato c = build_canonical(ZeroSet(), KatoMeasure({}, AcWeight::log_resolvent(k)));
    EXPECT_NEAR(c.beta(), 1.0, 1e-6);
    EXPECT_NEAR(c.alpha(), 0.0, 1e-6);
    for (int i = 0; i < 40; ++i) {
      const double x = std::pow(10.0, -2.0 + 4.0 * i / 39.0);
      const double expected = std::pow(1.0 + x / k, -k);
      EXPECT_NEAR(eval(c, cplx(x, 0)).real() / expected, 1.0, 1e-5) << "k = " << k << ", x = " << x;
    }
  }
}

TEST(Canonical, SinglePairAgreesWithItsZero) {
  const double eta = 1.0, alpha = 0.3;
  const cplx xi = KatoFunction::single_pair_zero(eta, alpha);
  EXPECT_NEAR(4 * xi.real() / std::norm(xi), 1 - alpha, 1e-14);
  const CanonicalKato c = build_canonical(ZeroSet({{xi, 1}}), KatoMeasure());
  EXPECT_NEAR(c.alpha(), alpha, 1e-12);
  const KatoFunction f = KatoFunction::single_pair(eta, alpha);
  for (cplx z : {cplx(0.1, 0.0), cplx(1.0, 1.0), cplx(0.0, 3.0), cplx(6.0, -2.0)})
    EXPECT_LT(std::abs(eval(f, z) - eval(c, z)), 1e-13) << z;
}

TEST(Canonical, AtomicExpAgreesWithItsAtom) {
  const double s = 2.0, alpha = 0.25;
  const double w = (1 - alpha) * kPi * s * s / 2;
  const CanonicalKato c = build_canonical(ZeroSet(), KatoMeasure({{s, w}}, std::nullopt));
  EXPECT_NEAR(c.alpha(), alpha, 1e-9);
  const KatoFunction f = KatoFunction::atomic_exp(s, alpha);
  for (cplx z : {cplx(0.1, 0.0), cplx(1.0, 1.0), cplx(0.0, 3.0)})
    EXPECT_LT(std::abs(eval(f, z) - eval(c, z)), 1e-8) << z;
}

TEST(Builtins, ClosedFormValues) {
  const cplx z(0.7, -1.3);
  EXPECT_LT(std::abs(eval(KatoFunction::exp(), z) - std::exp(-z)), 1e-15);
  EXPECT_LT(std::abs(eval(KatoFunction::resolvent_power(5), z) - std::pow(1.0 + z / 5.0, -5.0)), 1e-14);
  const double eta = 1.0, alpha = 0.5;
  const double c = 4 * eta / (1 - alpha);
  const cplx sp = (z * z - 2 * eta * z + c) / (z * z + 2 * eta * z + c) * std::exp(-alpha * z);
  EXPECT_LT(std::abs(eval(KatoFunction::single_pair(eta, alpha), z) - sp), 1e-15);
}

TEST(Builtins, ParameterValidation) {
  EXPECT_EQ(code_of([] { KatoFunction::resolvent_power(0); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { KatoFunction::single_pair(1.0, 1.0); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { KatoFunction::single_pair(9.0, 0.0); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { KatoFunction::atomic_exp(-1.0, 0.0); }), Errc::InvalidArgument);
}

TEST(AtomicExp, UnimodularOnTheBoundary) {
  const KatoFunction f = KatoFunction::atomic_exp(2.0, 0.25);
  for (double y = -10.0; y <= 10.0; y += 0.37) {
    if (std::abs(std::abs(y) - 2.0) < 1e-3) continue;
    EXPECT_NEAR(std::abs(eval(f, cplx(0, y))), 1.0, 1e-12) << y;
  }
  EXPECT_EQ(code_of([&] { eval(f, cplx(0, 2.0)); }), Errc::PoleAtBoundary);
}

TEST(Axioms, BuiltinsPass) {
  for (const KatoFunction& f : {KatoFunction::exp(), KatoFunction::resolvent_power(1), KatoFunction::resolvent_power(2),
                                KatoFunction::resolvent_power(5), KatoFunction::single_pair(1.0, 0.3),
                                KatoFunction::atomic_exp(2.0, 0.25)}) {
    const AxiomReport r = check_kato_axioms(f);
    EXPECT_TRUE(r.all_passed()) << f.name() << "(" << f.params() << ")";
  }
}

TEST(Axioms, BrokenBudgetFailsSlope) {
  const ZeroSet zs({{cplx(8.0, 0.0), 1}});  // kappa = 0.5
  const KatoMeasure m({{2.0, 0.5}}, std::nullopt);
  const CanonicalKato c = CanonicalKato::with_forced_alpha(zs, m, 0.6);
  const AxiomReport r = check_kato_axioms(KatoFunction::canonical(c));
  EXPECT_TRUE(r.at(Axiom::ValueAtZero).passed);
  EXPECT_FALSE(r.at(Axiom::SlopeAtZero).passed);
  EXPECT_NEAR(r.at(Axiom::SlopeAtZero).measured, -c.budget(), 1e-4);
  ASSERT_TRUE(r.first_failure().has_value());
  EXPECT_EQ(r.first_failure()->axiom, Axiom::SlopeAtZero);
}

TEST(Axioms, PureAlphaBelowOneFailsSlopeOnly) {
  const CanonicalKato c = CanonicalKato::with_forced_alpha(ZeroSet(), KatoMeasure(), 0.5);
  const AxiomReport r = check_kato_axioms(KatoFunction::canonical(c));
  EXPECT_FALSE(r.at(Axiom::SlopeAtZero).passed);
  EXPECT_NEAR(r.at(Axiom::SlopeAtZero).measured, -0.5, 1e-6);
  EXPECT_TRUE(r.at(Axiom::ValueAtZero).passed);
  EXPECT_TRUE(r.at(Axiom::RealRange).passed);
  EXPECT_TRUE(r.at(Axiom::HalfPlaneBound).passed);
}

TEST(BoundaryRegularity, EmptySetVanishes) {
  const std::vector<double> probes{1.0, 0.5, 0.25, 0.125};
  const auto d = boundary_regularity(ZeroSet(), 1.0, probes);
  EXPECT_EQ(d.verdict, RegularityVerdict::VanishingRatio);
  EXPECT_FALSE(d.accumulating);
}

TEST(BoundaryRegularity, ClassifiesAccumulatingSequences) {
  std::vector<double> probes;
  for (int j = 4; j <= 22; ++j) probes.push_back(std::ldexp(1.0, -j));
  std::vector<Zero> dense, sparse;
  // Distance 2^-k from i, real parts 2^-k (ratio stays ~2) or 4^-k (ratio -> 0). The sparse
  // sequence stops at k = 24 so that the distance 2^-k is not swallowed by rounding.
  for (int k = 4; k <= 40; ++k) dense.push_back({cplx(std::ldexp(1.0, -k), 1.0), 1});
  for (int k = 4; k <= 24; ++k) sparse.push_back({cplx(std::ldexp(1.0, -2 * k), 1.0 + std::ldexp(1.0, -k)), 1});
  const auto d1 = boundary_regularity(ZeroSet(dense), 1.0, probes);
  EXPECT_TRUE(d1.accumulating);
  EXPECT_EQ(d1.verdict, RegularityVerdict::NonVanishing);
  EXPECT_NEAR(d1.ratios.back(), 2.0, 1e-4);
  const auto d2 = boundary_regularity(ZeroSet(sparse), -1.0, probes);
  EXPECT_TRUE(d2.accumulating);
  EXPECT_EQ(d2.verdict, RegularityVerdict::VanishingRatio);
}

TEST(BoundaryRegularity, RejectsBadProbes) {
  const std::vector<double> up{0.1, 0.2};
  EXPECT_EQ(code_of([&] { boundary_regularity(ZeroSet(), 0.0, up); }), Errc::InvalidArgument);
}

TEST(Extrapolation, ExactOnPolynomials) {
  const std::vector<double> xs{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> vs;
  for (double x : xs) vs.push_back(3.0 - 2.0 * x + 0.5 * x * x * x);
  EXPECT_NEAR(extrapolate_to_zero(xs, vs), 3.0, 1e-13);
}

TEST(KatoJson, RoundTripsEveryVariant) {
  const CanonicalKato c = build_canonical(ZeroSet({{cplx(8.0, 4.0), 1}}),
                                          KatoMeasure({{2.0, 0.5}}, AcWeight::log_resolvent(2.0, 0.25)));
  for (const KatoFunction& f :
       {KatoFunction::exp(), KatoFunction::resolvent_power(3), KatoFunction::single_pair(0.5, 0.25),
        KatoFunction::atomic_exp(1.5, 0.0), KatoFunction::canonical(c),
        KatoFunction::canonical(CanonicalKato::with_forced_alpha(ZeroSet(), KatoMeasure(), 0.5))}) {
    const nlohmann::json j = to_json(f);
    EXPECT_EQ(kato_function_from_json(nlohmann::json::parse(j.dump())), f) << j.dump();
  }
}

TEST(KatoJson, ReportsBadDescriptors) {
  EXPECT_EQ(code_of([] { kato_function_from_json(nlohmann::json{{"variant", "gamma"}}); }), Errc::ConfigParse);
  EXPECT_EQ(code_of([] { kato_function_from_json(nlohmann::json{{"variant", "resolvent_power"}}); }),
            Errc::ConfigParse);
  EXPECT_EQ(code_of([] { kato_function_from_json(nlohmann::json{{"variant", "resolvent_power"}, {"k", 0}}); }),
            Errc::ConfigParse);
  const auto heavy = nlohmann::json::parse(R"({"variant": "canonical", "zeros": [[1, 0, 1]]})");
  EXPECT_EQ(code_of([&] { kato_function_from_json(heavy); }), Errc::KappaExceedsOne);
}
