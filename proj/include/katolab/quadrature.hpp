#pragma once

// Gauss-Legendre rules and a tan-mapped composite rule for improper
// integrals over (0, inf).

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace katolab::quadrature {

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
class GaussLegendre {
 public:
  explicit GaussLegendre(int points);

  /// Shared 64-point rule used by the half-line integrator.
  static const GaussLegendre& order64();

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  template <typename F>
  auto integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    decltype(f(mid)) sum{};
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return sum * half;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Features of an integrand over t in (0, inf) that the panel layout must
/// resolve. All scales are in t.
struct HalfLineFeatures {
  /// Smallest scale to resolve near t = 0 (grading stops below it).
  double origin_scale = 1e-3;
  /// Location and half-width of a near-singular peak in the interior
  /// (the kernel 1/(z^2 + t^2) peaks at t = |Im z| with width ~ Re z).
  double peak_location = 0.0;
  double peak_width = 0.0;
};

/// Panel edges in theta = atan(t) over [0, pi/2]: eight uniform base panels,
/// geometric grading toward both endpoints, and toward an interior peak when
/// one is declared.
std::vector<double> tan_mapped_panels(const HalfLineFeatures& features);

/// Integral over (0, inf) of an integrand written in the theta variable:
/// int_0^inf g(t) dt = int_0^{pi/2} g(tan th) sec^2(th) d th. The callback
/// receives theta and must return the full theta-space integrand (jacobian
/// included), which lets it use the stable form sec^2 / (z^2 + tan^2) =
/// 1 / (z^2 cos^2 + sin^2).
template <typename G>
auto integrate_tan_mapped(G&& g, const HalfLineFeatures& features) {
  const auto& rule = GaussLegendre::order64();
  const std::vector<double> edges = tan_mapped_panels(features);
  decltype(g(0.5)) sum{};
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) sum += rule.integrate(g, edges[p], edges[p + 1]);
  return sum;
}

/// Composite Gauss-Legendre nodes/weights on [0, T]: `panels` equal panels of
/// `points` nodes each.
struct Grid {
  double T = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

Grid gauss_legendre_grid(double T, int panels, int points);

/// Composite trapezoid rule with `intervals` equal intervals on [0, T].
Grid trapezoid_grid(double T, int intervals);

}  // namespace katolab::quadrature
