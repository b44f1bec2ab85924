#include "katolab/quadrature.hpp"

#include <algorithm>
#include <stdexcept>

#include "katolab/error.hpp"

namespace katolab::quadrature {

GaussLegendre::GaussLegendre(int points) : nodes_(points), weights_(points) {
  if (points < 1) throw Error(Errc::InvalidArgument, "Gauss-Legendre order must be >= 1");
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

const GaussLegendre& GaussLegendre::order64() {
  static const GaussLegendre rule(64);
  return rule;
}

std::vector<double> tan_mapped_panels(const HalfLineFeatures& features) {
  constexpr double kHalfPi = std::numbers::pi / 2;
  constexpr int kBasePanels = 8;
  constexpr double kBaseWidth = kHalfPi / kBasePanels;
  constexpr int kMaxLevels = 60;

  std::vector<double> edges;
  for (int p = 0; p <= kBasePanels; ++p) edges.push_back(kBaseWidth * p);

  // Toward t = 0.
  const double origin = std::max(features.origin_scale, 1e-300);
  for (double d = kBaseWidth / 2; d > 0.25 * std::atan(origin) && edges.size() < 200; d /= 2)
    edges.push_back(d);
  // Toward t = inf, where weights of logarithmic growth leave an integrable
  // log singularity in theta.
  {
    double d = kBaseWidth / 2;
    for (int level = 0; level < 40; ++level, d /= 2) edges.push_back(kHalfPi - d);
  }
  // Around an interior peak.
  if (features.peak_location > 0 && features.peak_width > 0) {
    const double centre = std::atan(features.peak_location);
    const double c2 = 1.0 / (1.0 + features.peak_location * features.peak_location);
    const double width = features.peak_width * c2;
    edges.push_back(centre);
    double d = kBaseWidth / 2;
    for (int level = 0; level < kMaxLevels && d > 0.05 * width; ++level, d /= 2) {
      if (centre - d > 0) edges.push_back(centre - d);
      if (centre + d < kHalfPi) edges.push_back(centre + d);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-300; }),
              edges.end());
  return edges;
}

Grid gauss_legendre_grid(double T, int panels, int points) {
  if (!(T > 0) || panels < 1 || points < 1)
    throw Error(Errc::InvalidArgument, "quadrature grid needs T > 0, panels >= 1, points >= 1");
  const GaussLegendre rule(points);
  Grid grid;
  grid.T = T;
  const double width = T / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    for (int i = 0; i < points; ++i) {
      grid.nodes.push_back(a + 0.5 * width * (rule.nodes()[i] + 1.0));
      grid.weights.push_back(0.5 * width * rule.weights()[i]);
    }
  }
  return grid;
}

Grid trapezoid_grid(double T, int intervals) {
  if (!(T > 0) || intervals < 1) throw Error(Errc::InvalidArgument, "trapezoid grid needs T > 0, intervals >= 1");
  Grid grid;
  grid.T = T;
  const double h = T / intervals;
  for (int i = 0; i <= intervals; ++i) {
    grid.nodes.push_back(i * h);
    grid.weights.push_back((i == 0 || i == intervals) ? 0.5 * h : h);
  }
  return grid;
}

}  // namespace katolab::quadrature
