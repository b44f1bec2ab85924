#pragma once

// Product formulas for e^{-itC}, C = A + B, and their convergence metrics.
//
// Every scheme is described by a one-step factor F(z) on the closed right
// half-plane; the unitary product at time t is F(it/n)^n, the real-time product
// F(t/n)^n, and the Chernoff quotient S_tau = (I - F(tau z))/tau.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "katolab/error.hpp"
#include "katolab/kato.hpp"
#include "katolab/log.hpp"
#include "katolab/quadrature.hpp"
#include "katolab/spectral.hpp"

namespace katolab {

namespace tolerances {
inline constexpr double kProjection = 1e-12;
inline constexpr double kCommuting = 1e-12;
}  // namespace tolerances

// ---------------------------------------------------------------------------
// Operator pair

template <typename Real>
class OperatorPair;

/// Checks both matrices are Hermitian PSD of equal size, decomposes A, B and
/// C = A + B, and (when P is given) builds the compressed Zeno generator.
template <typename Real>
OperatorPair<Real> make_operator_pair(const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b,
                                      const std::optional<ComplexMatrix<Real>>& projection = std::nullopt);

template <typename Real>
class OperatorPair {
 public:
  Eigen::Index dim() const noexcept { return a_.dim(); }
  const HermitianOperator<Real>& a() const noexcept { return a_; }
  const HermitianOperator<Real>& b() const noexcept { return b_; }
  /// Spectral data of A + B.
  const HermitianOperator<Real>& c() const noexcept { return c_; }

  const std::optional<ComplexMatrix<Real>>& zeno_projection() const noexcept { return p_; }
  /// Orthonormal basis of ran P as columns (dim x rank).
  const std::optional<ComplexMatrix<Real>>& zeno_range_basis() const noexcept { return q_; }
  /// Compression Q^dagger B Q of B to ran P.
  const std::optional<HermitianOperator<Real>>& zeno_generator() const noexcept { return cz_; }

  bool commuting(Real tol = Real(tolerances::kCommuting)) const {
    const ComplexMatrix<Real> am = a_.matrix();
    const ComplexMatrix<Real> bm = b_.matrix();
    return operator_norm(ComplexMatrix<Real>(am * bm - bm * am)) <= tol * (1 + operator_norm(am) * operator_norm(bm));
  }

 private:
  template <typename R>
  friend OperatorPair<R> make_operator_pair(const ComplexMatrix<R>&, const ComplexMatrix<R>&,
                                            const std::optional<ComplexMatrix<R>>&);

  HermitianOperator<Real> a_, b_, c_;
  std::optional<ComplexMatrix<Real>> p_, q_;
  std::optional<HermitianOperator<Real>> cz_;
};

using OperatorPaird = OperatorPair<double>;

template <typename Real>
OperatorPair<Real> make_operator_pair(const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b,
                                      const std::optional<ComplexMatrix<Real>>& projection) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(Errc::DimMismatch, "A and B have different shapes");
  OperatorPair<Real> pair;
  pair.a_ = hermitian_eigendecompose(a);
  pair.b_ = hermitian_eigendecompose(b);
  const ComplexMatrix<Real> sum = pair.a_.matrix() + pair.b_.matrix();
  pair.c_ = hermitian_eigendecompose(sum);

  if (projection) {
    const ComplexMatrix<Real>& p = *projection;
    if (p.rows() != a.rows() || p.cols() != a.cols()) throw Error(Errc::DimMismatch, "P has the wrong shape");
    if (!all_finite(p)) throw Error(Errc::BadProjection, "P has non-finite entries");
    const Real idem = operator_norm(ComplexMatrix<Real>(p * p - p));
    const Real herm = operator_norm(ComplexMatrix<Real>(p - p.adjoint()));
    if (idem > Real(tolerances::kProjection) || herm > Real(tolerances::kProjection)) {
      std::ostringstream os;
      os << "||P^2 - P|| = " << static_cast<double>(idem) << ", ||P - P^dagger|| = " << static_cast<double>(herm);
      throw Error(Errc::BadProjection, os.str());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(ComplexMatrix<Real>((p + p.adjoint()) / Real(2)));
    if (solver.info() != Eigen::Success) throw Error(Errc::EigensolverFailure, "projection spectrum");
    std::vector<Eigen::Index> range;
    for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j)
      if (solver.eigenvalues()(j) > Real(0.5)) range.push_back(j);
    if (range.empty()) throw Error(Errc::BadProjection, "P is the zero projection");
    ComplexMatrix<Real> q(a.rows(), static_cast<Eigen::Index>(range.size()));
    for (std::size_t c = 0; c < range.size(); ++c) q.col(static_cast<Eigen::Index>(c)) = solver.eigenvectors().col(range[c]);
    pair.p_ = p;
    pair.q_ = q;
    const ComplexMatrix<Real> compressed = q.adjoint() * pair.b_.matrix() * q;
    pair.cz_ = hermitian_eigendecompose(compressed);
  }
  return pair;
}

/// Orthogonal projection onto the first `rank` coordinate axes.
template <typename Real = double>
ComplexMatrix<Real> coordinate_projection(Eigen::Index dim, Eigen::Index rank) {
  if (rank < 1 || rank > dim) throw Error(Errc::InvalidArgument, "projection rank must be in [1, dim]");
  ComplexMatrix<Real> p = ComplexMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index i = 0; i < rank; ++i) p(i, i) = 1;
  return p;
}

// ---------------------------------------------------------------------------
// Schemes

namespace scheme {
struct TrotterPlain {
  bool operator==(const TrotterPlain&) const = default;
};
struct TrotterSymmetrized {
  bool operator==(const TrotterSymmetrized&) const = default;
};
struct KatoProduct {
  kato::KatoFunction f, g;
  bool operator==(const KatoProduct&) const = default;
};
struct KatoSymmetrized {
  kato::KatoFunction f, g;
  bool operator==(const KatoSymmetrized&) const = default;
};
struct CachiaAverage {
  kato::KatoFunction f, g;
  bool operator==(const CachiaAverage&) const = default;
};
struct LapidusResolvent {
  int k = 1;
  bool operator==(const LapidusResolvent&) const = default;
};
struct Zeno {
  bool operator==(const Zeno&) const = default;
};
struct RealTimePlain {
  bool operator==(const RealTimePlain&) const = default;
};
struct RealTimeSymmetrized {
  bool operator==(const RealTimeSymmetrized&) const = default;
};
/// The n -> inf limit e^{-itC}, computed spectrally.
struct Exact {
  bool operator==(const Exact&) const = default;
};
}  // namespace scheme

class ProductScheme {
 public:
  using Variant = std::variant<scheme::TrotterPlain, scheme::TrotterSymmetrized, scheme::KatoProduct,
                               scheme::KatoSymmetrized, scheme::CachiaAverage, scheme::LapidusResolvent,
                               scheme::Zeno, scheme::RealTimePlain, scheme::RealTimeSymmetrized, scheme::Exact>;

  static ProductScheme trotter_plain() { return ProductScheme(scheme::TrotterPlain{}); }
  static ProductScheme trotter_symmetrized() { return ProductScheme(scheme::TrotterSymmetrized{}); }
  /// The Kato-function schemes run check_kato_axioms on f and g and throw
  /// SchemeRejected naming the first failed axiom.
  static ProductScheme kato_product(kato::KatoFunction f, kato::KatoFunction g);
  static ProductScheme kato_symmetrized(kato::KatoFunction f, kato::KatoFunction g);
  static ProductScheme cachia_average(kato::KatoFunction f, kato::KatoFunction g);
  static ProductScheme lapidus_resolvent(int k);
  static ProductScheme zeno() { return ProductScheme(scheme::Zeno{}); }
  static ProductScheme real_time_plain() { return ProductScheme(scheme::RealTimePlain{}); }
  static ProductScheme real_time_symmetrized() { return ProductScheme(scheme::RealTimeSymmetrized{}); }
  static ProductScheme exact() { return ProductScheme(scheme::Exact{}); }

  const Variant& variant() const noexcept { return v_; }

  /// trotter_plain, kato_product, ... (stable identifiers used in reports)
  std::string name() const;
  /// Comma-free parameter string, e.g. "f=exp;g=resolvent_power(k=2)".
  std::string params() const;

  bool is_real_time() const noexcept {
    return std::holds_alternative<scheme::RealTimePlain>(v_) ||
           std::holds_alternative<scheme::RealTimeSymmetrized>(v_);
  }
  bool is_zeno() const noexcept { return std::holds_alternative<scheme::Zeno>(v_); }

  bool operator==(const ProductScheme&) const = default;

 private:
  explicit ProductScheme(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

namespace detail {

template <typename Real>
ComplexMatrix<Real> kato_of(const HermitianOperator<Real>& op, const kato::KatoFunction& f, Complex<Real> z) {
  return apply_scalar_function(op, [&](Real lambda) {
    const kato::cplx arg(static_cast<double>(z.real() * lambda), static_cast<double>(z.imag() * lambda));
    const kato::cplx v = kato::eval(f, arg);
    return Complex<Real>(Real(v.real()), Real(v.imag()));
  });
}

template <typename Real>
ComplexMatrix<Real> semigroup_at(const HermitianOperator<Real>& op, Complex<Real> z) {
  return apply_scalar_function(op, [z](Real lambda) { return std::exp(-z * lambda); });
}

template <typename Real>
ComplexMatrix<Real> resolvent_power(const HermitianOperator<Real>& op, Complex<Real> z, int k) {
  return matrix_power(resolvent(op, z), k);
}

}  // namespace detail

/// One-step factor F(z), Re z >= 0. Real-time variants use the Trotter factors;
/// the caller picks the argument.
template <typename Real>
ComplexMatrix<Real> one_step_factor(const OperatorPair<Real>& pair, const ProductScheme& s, Complex<Real> z) {
  using CM = ComplexMatrix<Real>;
  const auto& a = pair.a();
  const auto& b = pair.b();
  const Real half(0.5);
  struct Visitor {
    const OperatorPair<Real>& pair;
    const HermitianOperator<Real>& a;
    const HermitianOperator<Real>& b;
    Complex<Real> z;
    Real half;
    CM plain() const { return detail::semigroup_at(a, z) * detail::semigroup_at(b, z); }
    CM symmetric() const {
      const CM ha = detail::semigroup_at(a, z * half);
      return ha * detail::semigroup_at(b, z) * ha;
    }
    CM operator()(const scheme::TrotterPlain&) const { return plain(); }
    CM operator()(const scheme::RealTimePlain&) const { return plain(); }
    CM operator()(const scheme::TrotterSymmetrized&) const { return symmetric(); }
    CM operator()(const scheme::RealTimeSymmetrized&) const { return symmetric(); }
    CM operator()(const scheme::KatoProduct& s) const {
      return detail::kato_of(a, s.f, z) * detail::kato_of(b, s.g, z);
    }
    CM operator()(const scheme::KatoSymmetrized& s) const {
      const CM ha = detail::kato_of(a, s.f, z * half);
      return ha * detail::kato_of(b, s.g, z) * ha;
    }
    CM operator()(const scheme::CachiaAverage& s) const {
      const Complex<Real> twice = z * Real(2);
      return (detail::kato_of(a, s.f, twice) + detail::kato_of(b, s.g, twice)) * half;
    }
    CM operator()(const scheme::LapidusResolvent& s) const {
      const Complex<Real> step = z / Real(s.k);
      return detail::resolvent_power(a, step, s.k) * detail::resolvent_power(b, step, s.k);
    }
    CM operator()(const scheme::Zeno&) const {
      if (!pair.zeno_projection()) throw Error(Errc::MissingProjection, "Zeno scheme needs a projection P");
      const CM& p = *pair.zeno_projection();
      return p * detail::semigroup_at(b, z) * p;
    }
    CM operator()(const scheme::Exact&) const { return detail::semigroup_at(pair.c(), z); }
  };
  try {
    return std::visit(Visitor{pair, a, b, z, half}, s.variant());
  } catch (const Error& e) {
    if (e.code() == Errc::FunctionUndefinedAtSpectrum)
      throw Error(Errc::FunctionUndefinedAtSpectrum, std::string(e.what()) + " in scheme " + s.name(),
                  e.value().value_or(0.0));
    throw;
  }
}

namespace detail {

template <typename Real>
void check_step(const ProductScheme& s, Real t, long long n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be >= 1");
  if (!std::isfinite(static_cast<double>(t))) throw Error(Errc::InvalidArgument, "t must be finite");
  if (s.is_real_time() && t < 0) throw Error(Errc::InvalidArgument, "real-time schemes need t >= 0 (semigroup)");
}

/// Argument of the one-step factor for step t/n.
template <typename Real>
Complex<Real> step_argument(const ProductScheme& s, Real t, long long n) {
  const Real step = t / static_cast<Real>(n);
  return s.is_real_time() ? Complex<Real>(step, 0) : Complex<Real>(0, step);
}

/// F^n h, by repeated matvec or binary powering, whichever costs fewer flops.
template <typename Real>
ComplexVector<Real> power_apply(const ComplexMatrix<Real>& f, long long n, const ComplexVector<Real>& h) {
  const double d = static_cast<double>(f.rows());
  const double by_matvec = static_cast<double>(n) * d * d;
  const double by_powering = 2.0 * std::log2(static_cast<double>(n) + 1.0) * d * d * d;
  if (by_matvec <= by_powering) {
    ComplexVector<Real> v = h;
    for (long long i = 0; i < n; ++i) v = f * v;
    return v;
  }
  return matrix_power(f, n) * h;
}

}  // namespace detail

/// Pi_n(t): F(it/n)^n for unitary schemes, F(t/n)^n for real-time ones, and
/// e^{-itC} for the Exact sentinel.
template <typename Real>
ComplexMatrix<Real> product_operator(const OperatorPair<Real>& pair, const ProductScheme& s, Real t, long long n) {
  detail::check_step(s, t, n);
  if (std::holds_alternative<scheme::Exact>(s.variant())) return unitary_group(pair.c(), t);
  return matrix_power(one_step_factor(pair, s, detail::step_argument(s, t, n)), n);
}

/// Pi_n(t) h without forming Pi_n(t) when repeated matvec is cheaper.
template <typename Real>
ComplexVector<Real> product_apply(const OperatorPair<Real>& pair, const ProductScheme& s, Real t, long long n,
                                  const ComplexVector<Real>& h) {
  detail::check_step(s, t, n);
  if (std::holds_alternative<scheme::Exact>(s.variant())) return unitary_group(pair.c(), t) * h;
  return detail::power_apply(one_step_factor(pair, s, detail::step_argument(s, t, n)), n, h);
}

/// Limit object the scheme is compared against: e^{-itC}, e^{-tC} for the
/// real-time schemes, and Q e^{-itC_zeno} Q^dagger for Zeno.
template <typename Real>
ComplexMatrix<Real> limit_operator(const OperatorPair<Real>& pair, const ProductScheme& s, Real t) {
  if (s.is_real_time()) return contraction_semigroup(pair.c(), t);
  if (s.is_zeno()) {
    if (!pair.zeno_generator()) throw Error(Errc::MissingProjection, "Zeno scheme needs a projection P");
    const auto& q = *pair.zeno_range_basis();
    return q * unitary_group(*pair.zeno_generator(), t) * q.adjoint();
  }
  return unitary_group(pair.c(), t);
}

// ---------------------------------------------------------------------------
// Metrics

/// Validated time quadrature on [0, T]: nodes strictly increasing in [0, T],
/// positive weights summing to T within 1e-12.
template <typename Real = double>
class QuadratureGrid {
 public:
  QuadratureGrid(Real T, std::vector<Real> nodes, std::vector<Real> weights, std::string description)
      : T_(T), nodes_(std::move(nodes)), weights_(std::move(weights)), description_(std::move(description)) {
    if (!(T_ > 0)) throw Error(Errc::InvalidArgument, "grid needs T > 0");
    if (nodes_.size() != weights_.size() || nodes_.empty())
      throw Error(Errc::InvalidArgument, "grid nodes and weights must be non-empty and match");
    Real sum = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!(nodes_[i] >= 0 && nodes_[i] <= T_)) throw Error(Errc::InvalidArgument, "grid node outside [0, T]");
      if (i > 0 && !(nodes_[i] > nodes_[i - 1])) throw Error(Errc::InvalidArgument, "grid nodes must increase");
      if (!(weights_[i] > 0)) throw Error(Errc::InvalidArgument, "grid weights must be positive");
      sum += weights_[i];
    }
    if (std::abs(static_cast<double>(sum - T_)) > 1e-12 * std::max(1.0, static_cast<double>(T_)))
      throw Error(Errc::InvalidArgument, "grid weights do not sum to T");
  }

  /// `panels` equal panels of `points`-node Gauss-Legendre (default 8 x 16).
  static QuadratureGrid gauss_legendre(Real T, int panels = 8, int points = 16) {
    const auto g = quadrature::gauss_legendre_grid(static_cast<double>(T), panels, points);
    std::ostringstream os;
    os << "gauss_legendre(" << panels << "x" << points << ")";
    return QuadratureGrid(T, cast(g.nodes), cast(g.weights), os.str());
  }

  static QuadratureGrid trapezoid(Real T, int intervals) {
    const auto g = quadrature::trapezoid_grid(static_cast<double>(T), intervals);
    return QuadratureGrid(T, cast(g.nodes), cast(g.weights), "trapezoid(" + std::to_string(intervals) + ")");
  }

  Real T() const noexcept { return T_; }
  const std::vector<Real>& nodes() const noexcept { return nodes_; }
  const std::vector<Real>& weights() const noexcept { return weights_; }
  const std::string& description() const noexcept { return description_; }

 private:
  static std::vector<Real> cast(const std::vector<double>& v) { return std::vector<Real>(v.begin(), v.end()); }

  Real T_;
  std::vector<Real> nodes_, weights_;
  std::string description_;
};

namespace detail {

/// h restricted to ran P for the Zeno comparator (warns when h had a ker P part).
template <typename Real>
ComplexVector<Real> prepare_vector(const OperatorPair<Real>& pair, const ProductScheme& s,
                                   const ComplexVector<Real>& h) {
  if (h.size() != pair.dim()) throw Error(Errc::DimMismatch, "vector h has the wrong size");
  if (!all_finite(h)) throw Error(Errc::InvalidArgument, "vector h is not finite");
  if (h.norm() > Real(1e6)) throw Error(Errc::InvalidArgument, "||h|| exceeds 1e6");
  if (!s.is_zeno()) return h;
  if (!pair.zeno_projection()) throw Error(Errc::MissingProjection, "Zeno scheme needs a projection P");
  const ComplexVector<Real> projected = *pair.zeno_projection() * h;
  if ((h - projected).norm() > Real(1e-12)) log_warning("Zeno sweep: h projected into ran P");
  return projected;
}

template <typename Real>
std::vector<Real> pointwise_errors(const OperatorPair<Real>& pair, const ProductScheme& s, long long n,
                                   const ComplexVector<Real>& h, const std::vector<Real>& times) {
  const ComplexVector<Real> v = prepare_vector(pair, s, h);
  std::vector<Real> out;
  out.reserve(times.size());
  for (Real t : times)
    out.push_back((product_apply(pair, s, t, n, v) - limit_operator(pair, s, t) * v).norm());
  return out;
}

}  // namespace detail

/// sum_j w_j ||Pi_n(t_j) h - limit(t_j) h||^2, the quadrature of the
/// L^2([0, T]) error.
template <typename Real>
Real l2_time_error(const OperatorPair<Real>& pair, const ProductScheme& s, long long n,
                   const ComplexVector<Real>& h, const QuadratureGrid<Real>& grid) {
  const auto errors = detail::pointwise_errors(pair, s, n, h, grid.nodes());
  Real sum = 0;
  for (std::size_t j = 0; j < errors.size(); ++j) sum += grid.weights()[j] * errors[j] * errors[j];
  return sum;
}

/// sum_j w_j ||Pi_n(t_j) - limit(t_j)||_op^2.
template <typename Real>
Real operator_l2_time_error(const OperatorPair<Real>& pair, const ProductScheme& s, long long n,
                            const QuadratureGrid<Real>& grid) {
  Real sum = 0;
  for (std::size_t j = 0; j < grid.nodes().size(); ++j) {
    const Real t = grid.nodes()[j];
    ComplexMatrix<Real> diff = product_operator(pair, s, t, n) - limit_operator(pair, s, t);
    if (s.is_zeno()) {
      const auto& p = *pair.zeno_projection();
      diff = diff * p;
    }
    const Real e = operator_norm(diff);
    sum += grid.weights()[j] * e * e;
  }
  return sum;
}

/// Quadrature estimate of |{t in [0, T] : ||Pi_n(t) h - limit(t) h|| >= eta}|.
template <typename Real>
Real measure_error(const OperatorPair<Real>& pair, const ProductScheme& s, long long n,
                   const ComplexVector<Real>& h, const QuadratureGrid<Real>& grid, Real eta) {
  if (!(eta > 0)) throw Error(Errc::InvalidArgument, "eta must be > 0");
  const auto errors = detail::pointwise_errors(pair, s, n, h, grid.nodes());
  Real sum = 0;
  for (std::size_t j = 0; j < errors.size(); ++j)
    if (errors[j] >= eta) sum += grid.weights()[j];
  return sum;
}

/// max over grid nodes of ||(F(t/n))^n h - e^{-tC} h||; real-time schemes only.
template <typename Real>
Real sup_time_error(const OperatorPair<Real>& pair, const ProductScheme& s, long long n,
                    const ComplexVector<Real>& h, const QuadratureGrid<Real>& grid) {
  if (!s.is_real_time())
    throw Error(Errc::SchemeMismatch, "sup-in-time error is defined for real-time schemes, got " + s.name());
  const auto errors = detail::pointwise_errors(pair, s, n, h, grid.nodes());
  return *std::max_element(errors.begin(), errors.end());
}

/// ||Sym_n(t) - e^{itA/2n} Plain_n(t) e^{-itA/2n}||_op.
template <typename Real>
Real symmetrization_identity_residual(const OperatorPair<Real>& pair, Real t, long long n) {
  const ComplexMatrix<Real> sym = product_operator(pair, ProductScheme::trotter_symmetrized(), t, n);
  const ComplexMatrix<Real> plain = product_operator(pair, ProductScheme::trotter_plain(), t, n);
  const Real half_step = t / (2 * static_cast<Real>(n));
  const ComplexMatrix<Real> conj = unitary_group(pair.a(), -half_step) * plain * unitary_group(pair.a(), half_step);
  return operator_norm(ComplexMatrix<Real>(sym - conj));
}

namespace detail {

/// (I + S)^{-1} with S = (I - F)/tau.
template <typename Real>
ComplexMatrix<Real> chernoff_resolvent(const ComplexMatrix<Real>& factor, Real tau) {
  const Eigen::Index d = factor.rows();
  const ComplexMatrix<Real> id = ComplexMatrix<Real>::Identity(d, d);
  const ComplexMatrix<Real> m = id + (id - factor) / tau;
  Eigen::PartialPivLU<ComplexMatrix<Real>> lu(m);
  const Real rcond = lu.rcond();
  if (!(rcond > Real(1e-14)))
    throw Error(Errc::SingularInverse, "I + S_tau is numerically singular", static_cast<double>(rcond));
  return lu.solve(id);
}

/// (I + zC)^{-1}, or Q (I + zC_zeno)^{-1} Q^dagger for Zeno.
template <typename Real>
ComplexMatrix<Real> limit_resolvent(const OperatorPair<Real>& pair, const ProductScheme& s, Complex<Real> z) {
  if (s.is_zeno()) {
    if (!pair.zeno_generator()) throw Error(Errc::MissingProjection, "Zeno scheme needs a projection P");
    const auto& q = *pair.zeno_range_basis();
    return q * resolvent(*pair.zeno_generator(), z) * q.adjoint();
  }
  return resolvent(pair.c(), z);
}

}  // namespace detail

/// ||(I + S_tau(t))^{-1} - (I + tC)^{-1}||_op with S_tau(t) = (I - F(tau t))/tau
/// and F the scheme's one-step factor at the real argument tau t.
template <typename Real>
Real chernoff_resolvent_error(const OperatorPair<Real>& pair, const ProductScheme& s, Real tau, Real t) {
  if (!(tau > 0)) throw Error(Errc::InvalidArgument, "tau must be > 0");
  if (!(t >= 0)) throw Error(Errc::InvalidArgument, "t must be >= 0");
  const ComplexMatrix<Real> factor = one_step_factor(pair, s, Complex<Real>(tau * t, 0));
  const ComplexMatrix<Real> lhs = detail::chernoff_resolvent(factor, tau);
  return operator_norm(ComplexMatrix<Real>(lhs - detail::limit_resolvent(pair, s, Complex<Real>(t, 0))));
}

/// Quadrature over [0, T] of ||(I + S_tau(it))^{-1} h - (I + itC)^{-1} h||^2,
/// S_tau(it) = (I - F(i tau t))/tau with boundary factors.
template <typename Real>
Real boundary_resolvent_l2_error(const OperatorPair<Real>& pair, const ProductScheme& s, Real tau,
                                 const ComplexVector<Real>& h, const QuadratureGrid<Real>& grid) {
  if (!(tau > 0)) throw Error(Errc::InvalidArgument, "tau must be > 0");
  const ComplexVector<Real> v = detail::prepare_vector(pair, s, h);
  Real sum = 0;
  for (std::size_t j = 0; j < grid.nodes().size(); ++j) {
    const Real t = grid.nodes()[j];
    const ComplexMatrix<Real> factor = one_step_factor(pair, s, Complex<Real>(0, tau * t));
    const ComplexVector<Real> lhs = detail::chernoff_resolvent(factor, tau) * v;
    const ComplexVector<Real> rhs = detail::limit_resolvent(pair, s, Complex<Real>(0, t)) * v;
    sum += grid.weights()[j] * (lhs - rhs).squaredNorm();
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Reports

/// The resolvent metrics are swept over tau = 1/n so that every metric is
/// reported against an increasing integer n.
enum class MetricKind {
  L2Time,
  MeasureExceedance,
  SupTime,
  OperatorNormL2Time,
  ChernoffResolvent,
  BoundaryResolventL2,
};

struct Metric {
  MetricKind kind = MetricKind::L2Time;
  double eta = 0;  ///< MeasureExceedance threshold
  double t = 1;    ///< ChernoffResolvent time

  /// l2, measure(eta=...), sup, operator_l2, chernoff(t=...), boundary_resolvent
  std::string label() const;

  bool operator==(const Metric&) const = default;
};

struct ReportEntry {
  long long n = 0;
  double error = 0;
  double error_normalized = 0;
};

struct ConvergenceReport {
  std::string scheme;
  std::string variant_params;
  Metric metric;
  double T = 0;
  std::string grid;
  long long dim = 0;
  std::uint64_t seed = 0;
  std::string vector_descriptor;
  std::vector<ReportEntry> entries;
};

/// Normalization: L^2 metrics by ||h||^2, sup by ||h||, measure by T.
double normalize_error(const Metric& metric, double error, double h_norm, double T);

/// Evaluates one metric at a single n.
template <typename Real>
Real metric_error(const OperatorPair<Real>& pair, const ProductScheme& s, const Metric& metric, long long n,
                  const ComplexVector<Real>& h, const QuadratureGrid<Real>& grid) {
  switch (metric.kind) {
    case MetricKind::L2Time: return l2_time_error(pair, s, n, h, grid);
    case MetricKind::MeasureExceedance: return measure_error(pair, s, n, h, grid, Real(metric.eta));
    case MetricKind::SupTime: return sup_time_error(pair, s, n, h, grid);
    case MetricKind::OperatorNormL2Time: return operator_l2_time_error(pair, s, n, grid);
    case MetricKind::ChernoffResolvent:
      return chernoff_resolvent_error(pair, s, Real(1) / static_cast<Real>(n), Real(metric.t));
    case MetricKind::BoundaryResolventL2:
      return boundary_resolvent_l2_error(pair, s, Real(1) / static_cast<Real>(n), h, grid);
  }
  throw Error(Errc::InvalidArgument, "unknown metric");
}

/// Runs one metric over strictly increasing n values.
template <typename Real>
ConvergenceReport sweep(const OperatorPair<Real>& pair, const ProductScheme& s, const Metric& metric,
                        const std::vector<long long>& n_values, const ComplexVector<Real>& h,
                        const QuadratureGrid<Real>& grid) {
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1) throw Error(Errc::InvalidArgument, "n values must be >= 1");
    if (i > 0 && n_values[i] <= n_values[i - 1]) throw Error(Errc::InvalidArgument, "n values must increase");
  }
  ConvergenceReport report;
  report.scheme = s.name();
  report.variant_params = s.params();
  report.metric = metric;
  report.T = static_cast<double>(grid.T());
  report.grid = grid.description();
  report.dim = pair.dim();
  const double h_norm = static_cast<double>(detail::prepare_vector(pair, s, h).norm());
  for (long long n : n_values) {
    const double e = static_cast<double>(metric_error(pair, s, metric, n, h, grid));
    report.entries.push_back({n, e, normalize_error(metric, e, h_norm, report.T)});
  }
  return report;
}

}  // namespace katolab
