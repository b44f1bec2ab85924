#pragma once

// Dense finite-difference Schroedinger pair on a box: A = -(1/2) d^2/dx^2
// with Dirichlet ends, B = multiplication by V >= 0.

#include <string>
#include <vector>

#include "katolab/product.hpp"

namespace katolab {

struct Potential {
  /// "zero", "quadratic" (V = c x^2) or "inverse_power" (V = g |x|^-p).
  std::string id = "zero";
  double c = 1;
  double g = 1;
  double p = 1;

  static Potential zero() { return {}; }
  static Potential quadratic(double c) { return {"quadratic", c, 1, 1}; }
  static Potential inverse_power(double g, double p) { return {"inverse_power", 1, g, p}; }

  /// Throws InvalidArgument for an unknown id or non-finite parameters.
  void validate() const;
  double operator()(double x) const;
  /// "c=1", "g=1;p=1.5" or "".
  std::string params() const;

  bool operator==(const Potential&) const = default;
};

/// Nodes x_j = -L + j * 2L/(d+1), j = 1..d. If V is not finite at some node
/// the whole grid is shifted by half a step.
struct SchrodingerGrid {
  std::vector<double> nodes;
  double spacing = 0;
  bool shifted = false;
};

SchrodingerGrid schrodinger_grid(int d, double L, const Potential& v);

/// d >= 8 and a power of two, L > 0. PotentialSingularOnGrid if V is
/// infinite or negative at a node after the offset.
OperatorPaird assemble_schrodinger(int d, double L, const Potential& v,
                                   const std::optional<ComplexMatrixd>& projection = std::nullopt);

}  // namespace katolab
