#include "katolab/schrodinger.hpp"
#include "katolab/format.hpp"

#include <cmath>

namespace katolab {
namespace {

std::string fmt(double v) { return shortest(v); }

bool admissible(double v) { return std::isfinite(v) && v >= 0; }

}  // namespace

void Potential::validate() const {
  if (id == "zero") return;
  if (id == "quadratic") {
    if (!std::isfinite(c)) throw Error(Errc::InvalidArgument, "quadratic potential needs finite c");
    return;
  }
  if (id == "inverse_power") {
    if (!std::isfinite(g) || !std::isfinite(p)) throw Error(Errc::InvalidArgument, "inverse_power needs finite g, p");
    return;
  }
  throw Error(Errc::InvalidArgument, "unknown potential id \"" + id + "\"");
}

double Potential::operator()(double x) const {
  if (id == "quadratic") return c * x * x;
  if (id == "inverse_power") return g * std::pow(std::abs(x), -p);
  return 0.0;
}

std::string Potential::params() const {
  if (id == "quadratic") return "c=" + fmt(c);
  if (id == "inverse_power") return "g=" + fmt(g) + ";p=" + fmt(p);
  return "";
}

SchrodingerGrid schrodinger_grid(int d, double L, const Potential& v) {
  if (d < 8 || (d & (d - 1)) != 0) throw Error(Errc::InvalidArgument, "grid points must be a power of two >= 8");
  if (!(L > 0) || !std::isfinite(L)) throw Error(Errc::InvalidArgument, "box half-width must be > 0");
  v.validate();
  SchrodingerGrid grid;
  grid.spacing = 2 * L / (d + 1);
  for (int j = 1; j <= d; ++j) grid.nodes.push_back(-L + j * grid.spacing);
  bool singular = false;
  for (double x : grid.nodes) singular = singular || !std::isfinite(v(x));
  if (singular) {
    for (double& x : grid.nodes) x += grid.spacing / 2;
    grid.shifted = true;
  }
  for (double x : grid.nodes)
    if (!admissible(v(x)))
      throw Error(Errc::PotentialSingularOnGrid, "V(" + fmt(x) + ") = " + fmt(v(x)) + " is not finite and >= 0", x);
  return grid;
}

OperatorPaird assemble_schrodinger(int d, double L, const Potential& v,
                                   const std::optional<ComplexMatrixd>& projection) {
  const SchrodingerGrid grid = schrodinger_grid(d, L, v);
  const double scale = 1.0 / (2 * grid.spacing * grid.spacing);
  ComplexMatrixd a = ComplexMatrixd::Zero(d, d);
  ComplexMatrixd b = ComplexMatrixd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    a(j, j) = 2 * scale;
    if (j + 1 < d) a(j, j + 1) = a(j + 1, j) = -scale;
    b(j, j) = v(grid.nodes[j]);
  }
  return make_operator_pair<double>(a, b, projection);
}

}  // namespace katolab
