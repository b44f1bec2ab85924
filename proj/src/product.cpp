#include "katolab/product.hpp"
#include "katolab/format.hpp"

namespace katolab {
namespace {

std::string fmt(double v) { return shortest(v); }

std::string describe(const kato::KatoFunction& f) {
  const std::string p = f.params();
  return p.empty() ? f.name() : f.name() + "(" + p + ")";
}

void require_axioms(const kato::KatoFunction& f, const char* role) {
  const kato::AxiomReport report = kato::check_kato_axioms(f);
  if (const auto failure = report.first_failure())
    throw Error(Errc::SchemeRejected, std::string(role) + " = " + describe(f) + " fails axiom " +
                                          kato::axiom_name(failure->axiom) + ": " + failure->detail);
}

void require_pair(const kato::KatoFunction& f, const kato::KatoFunction& g) {
  require_axioms(f, "f");
  if (!(g == f)) require_axioms(g, "g");
}

}  // namespace

ProductScheme ProductScheme::kato_product(kato::KatoFunction f, kato::KatoFunction g) {
  require_pair(f, g);
  return ProductScheme(scheme::KatoProduct{std::move(f), std::move(g)});
}

ProductScheme ProductScheme::kato_symmetrized(kato::KatoFunction f, kato::KatoFunction g) {
  require_pair(f, g);
  return ProductScheme(scheme::KatoSymmetrized{std::move(f), std::move(g)});
}

ProductScheme ProductScheme::cachia_average(kato::KatoFunction f, kato::KatoFunction g) {
  require_pair(f, g);
  return ProductScheme(scheme::CachiaAverage{std::move(f), std::move(g)});
}

ProductScheme ProductScheme::lapidus_resolvent(int k) {
  if (k < 1) throw Error(Errc::InvalidArgument, "Lapidus resolvent power needs k >= 1");
  return ProductScheme(scheme::LapidusResolvent{k});
}

std::string ProductScheme::name() const {
  struct Visitor {
    std::string operator()(const scheme::TrotterPlain&) const { return "trotter_plain"; }
    std::string operator()(const scheme::TrotterSymmetrized&) const { return "trotter_symmetrized"; }
    std::string operator()(const scheme::KatoProduct&) const { return "kato_product"; }
    std::string operator()(const scheme::KatoSymmetrized&) const { return "kato_symmetrized"; }
    std::string operator()(const scheme::CachiaAverage&) const { return "cachia_average"; }
    std::string operator()(const scheme::LapidusResolvent&) const { return "lapidus_resolvent"; }
    std::string operator()(const scheme::Zeno&) const { return "zeno"; }
    std::string operator()(const scheme::RealTimePlain&) const { return "real_time_plain"; }
    std::string operator()(const scheme::RealTimeSymmetrized&) const { return "real_time_symmetrized"; }
    std::string operator()(const scheme::Exact&) const { return "exact"; }
  };
  return std::visit(Visitor{}, v_);
}

std::string ProductScheme::params() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, scheme::KatoProduct> || std::is_same_v<S, scheme::KatoSymmetrized> ||
                      std::is_same_v<S, scheme::CachiaAverage>) {
          return "f=" + describe(s.f) + ";g=" + describe(s.g);
        } else if constexpr (std::is_same_v<S, scheme::LapidusResolvent>) {
          return "k=" + std::to_string(s.k);
        } else {
          return "";
        }
      },
      v_);
}

std::string Metric::label() const {
  switch (kind) {
    case MetricKind::L2Time: return "l2";
    case MetricKind::MeasureExceedance: return "measure(eta=" + fmt(eta) + ")";
    case MetricKind::SupTime: return "sup";
    case MetricKind::OperatorNormL2Time: return "operator_l2";
    case MetricKind::ChernoffResolvent: return "chernoff(t=" + fmt(t) + ")";
    case MetricKind::BoundaryResolventL2: return "boundary_resolvent";
  }
  return "?";
}

double normalize_error(const Metric& metric, double error, double h_norm, double T) {
  switch (metric.kind) {
    case MetricKind::L2Time: return h_norm > 0 ? error / (h_norm * h_norm) : 0.0;
    case MetricKind::SupTime: return h_norm > 0 ? error / h_norm : 0.0;
    case MetricKind::MeasureExceedance: return T > 0 ? error / T : 0.0;
    case MetricKind::OperatorNormL2Time: return error;
    case MetricKind::ChernoffResolvent: return error;
    case MetricKind::BoundaryResolventL2: return h_norm > 0 ? error / (h_norm * h_norm) : 0.0;
  }
  return error;
}

}  // namespace katolab
