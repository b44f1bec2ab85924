#pragma once

// Dense complex linear algebra and spectral functional calculus.
//
// A non-negative Hermitian matrix is held as spectral data (ascending
// eigenvalues plus an orthonormal eigenbasis); every matrix function, including
// the exponential, is formed as V diag(phi(lambda)) V^dagger.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <type_traits>
#include <utility>

#include "katolab/error.hpp"
#include "katolab/log.hpp"
#include "katolab/random.hpp"

namespace katolab {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrixd = ComplexMatrix<double>;
using ComplexVectord = ComplexVector<double>;
using RealVectord = RealVector<double>;

namespace tolerances {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kSingularResolvent = 1e-14;
}  // namespace tolerances

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if constexpr (std::is_arithmetic_v<std::decay_t<decltype(v)>>) {
        if (!std::isfinite(v)) return false;
      } else if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        return false;
      }
    }
  return true;
}

/// Largest singular value. Computed from the spectrum of m^dagger m with the
/// self-adjoint eigensolver, which converges for every finite input.
template <typename Derived>
auto operator_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (m.size() == 0) return Real(0);
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Dense gram = m.cols() <= m.rows() ? Dense(m.adjoint() * m) : Dense(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Dense> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::IterationLimit, "singular value iteration did not converge");
  using std::sqrt;
  return sqrt(std::max(Real(0), solver.eigenvalues().maxCoeff()));
}

template <typename Derived>
auto vector_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

template <typename Real>
ComplexVector<Real> matvec(const ComplexMatrix<Real>& m, const ComplexVector<Real>& v) {
  if (m.cols() != v.size()) throw Error(Errc::DimMismatch, "matvec: matrix and vector sizes differ");
  return m * v;
}

/// Non-negative Hermitian operator stored as ascending eigenvalues and an
/// orthonormal eigenbasis (columns). Construct with hermitian_eigendecompose.
template <typename Real>
class HermitianOperator {
 public:
  Eigen::Index dim() const noexcept { return eigenvalues_.size(); }
  const RealVector<Real>& eigenvalues() const noexcept { return eigenvalues_; }
  const ComplexMatrix<Real>& eigenbasis() const noexcept { return eigenbasis_; }

  /// V diag(lambda) V^dagger.
  ComplexMatrix<Real> matrix() const {
    return eigenbasis_ * eigenvalues_.template cast<Complex<Real>>().asDiagonal() *
           eigenbasis_.adjoint();
  }

  Real spectral_radius() const { return dim() == 0 ? Real(0) : eigenvalues_.cwiseAbs().maxCoeff(); }

  /// Number of round-off negative eigenvalues that were clamped to zero.
  int clamped_count() const noexcept { return clamped_; }

 private:
  template <typename R, typename Derived>
  friend HermitianOperator<R> hermitian_eigendecompose_as(const Eigen::MatrixBase<Derived>&);

  RealVector<Real> eigenvalues_;
  ComplexMatrix<Real> eigenbasis_;
  int clamped_ = 0;
};

using HermitianOperatord = HermitianOperator<double>;

template <typename Real, typename Derived>
HermitianOperator<Real> hermitian_eigendecompose_as(const Eigen::MatrixBase<Derived>& input) {
  if (input.rows() != input.cols()) throw Error(Errc::DimMismatch, "matrix is not square");
  if (input.rows() < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
  const ComplexMatrix<Real> m = input.template cast<Complex<Real>>();
  if (!all_finite(m)) throw Error(Errc::InvalidArgument, "matrix has non-finite entries");

  const Real norm = operator_norm(m);
  const Real asym = operator_norm(ComplexMatrix<Real>(m - m.adjoint()));
  if (asym > Real(tolerances::kHermitian) * (1 + norm)) {
    std::ostringstream os;
    os << "||m - m^dagger|| = " << static_cast<double>(asym);
    throw Error(Errc::NotHermitian, os.str(), static_cast<double>(asym));
  }
  const ComplexMatrix<Real> herm = (m + m.adjoint()) / Real(2);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(herm);
  if (solver.info() != Eigen::Success) throw Error(Errc::EigensolverFailure, "QL iteration did not converge");

  HermitianOperator<Real> op;
  op.eigenvalues_ = solver.eigenvalues();
  op.eigenbasis_ = solver.eigenvectors();

  const Real radius = op.eigenvalues_.cwiseAbs().maxCoeff();
  const Real tol_psd = Real(tolerances::kPsd) * std::max(Real(1), radius);
  for (Eigen::Index j = 0; j < op.eigenvalues_.size(); ++j) {
    Real& lambda = op.eigenvalues_(j);
    if (lambda >= 0) continue;
    if (lambda < -tol_psd) {
      std::ostringstream os;
      os << "eigenvalue " << static_cast<double>(lambda) << " below -" << static_cast<double>(tol_psd);
      throw Error(Errc::NotPSD, os.str(), static_cast<double>(lambda));
    }
    lambda = 0;
    ++op.clamped_;
  }
  if (op.clamped_ > 0) {
    std::ostringstream os;
    os << "clamped " << op.clamped_ << " round-off negative eigenvalue(s) to zero";
    log_warning(os.str());
  }
  return op;
}

/// Spectral decomposition of a Hermitian non-negative matrix; the real scalar
/// type follows the input.
template <typename Derived>
auto hermitian_eigendecompose(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  return hermitian_eigendecompose_as<Real>(m);
}

/// V diag(phi(lambda_j)) V^dagger. A phi that throws katolab::Error or returns
/// a non-finite value is reported as FunctionUndefinedAtSpectrum carrying the
/// offending eigenvalue.
template <typename Real, typename Phi>
ComplexMatrix<Real> apply_scalar_function(const HermitianOperator<Real>& op, Phi&& phi) {
  ComplexVector<Real> values(op.dim());
  for (Eigen::Index j = 0; j < op.dim(); ++j) {
    const Real lambda = op.eigenvalues()(j);
    Complex<Real> v;
    try {
      v = Complex<Real>(phi(lambda));
    } catch (const Error& e) {
      throw Error(Errc::FunctionUndefinedAtSpectrum,
                  "at eigenvalue " + std::to_string(static_cast<double>(lambda)) + " (" + e.what() + ")",
                  static_cast<double>(lambda));
    }
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(Errc::FunctionUndefinedAtSpectrum,
                  "non-finite value at eigenvalue " + std::to_string(static_cast<double>(lambda)),
                  static_cast<double>(lambda));
    values(j) = v;
  }
  return op.eigenbasis() * values.asDiagonal() * op.eigenbasis().adjoint();
}

/// e^{-itA}.
template <typename Real>
ComplexMatrix<Real> unitary_group(const HermitianOperator<Real>& op, Real t) {
  return apply_scalar_function(op, [t](Real lambda) { return std::exp(Complex<Real>(0, -t * lambda)); });
}

/// e^{-tA}, the self-adjoint contraction semigroup.
template <typename Real>
ComplexMatrix<Real> contraction_semigroup(const HermitianOperator<Real>& op, Real t) {
  return apply_scalar_function(op, [t](Real lambda) { return Complex<Real>(std::exp(-t * lambda)); });
}

/// (I + zA)^{-1}.
template <typename Real>
ComplexMatrix<Real> resolvent(const HermitianOperator<Real>& op, Complex<Real> z) {
  ComplexVector<Real> values(op.dim());
  for (Eigen::Index j = 0; j < op.dim(); ++j) {
    const Complex<Real> denom = Real(1) + z * op.eigenvalues()(j);
    if (std::abs(denom) < Real(tolerances::kSingularResolvent))
      throw Error(Errc::SingularResolvent, "1 + z*lambda vanishes",
                  static_cast<double>(op.eigenvalues()(j)));
    values(j) = Real(1) / denom;
  }
  return op.eigenbasis() * values.asDiagonal() * op.eigenbasis().adjoint();
}

/// m^n by binary exponentiation.
template <typename Derived>
auto matrix_power(const Eigen::MatrixBase<Derived>& m, long long n) {
  using Dense = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (n < 1) throw Error(Errc::InvalidArgument, "matrix_power: exponent must be >= 1");
  if (m.rows() != m.cols()) throw Error(Errc::DimMismatch, "matrix_power: matrix is not square");
  Dense base = m;
  Dense result;
  bool have = false;
  while (n > 0) {
    if (n & 1) {
      result = have ? Dense(result * base) : base;
      have = true;
    }
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

/// Seeded Hermitian PSD matrix with spectral radius `scale`: M = G G^dagger
/// rescaled, where G has entries re, im ~ U[-1, 1) drawn row-major from
/// SplitMix64(seed).
template <typename Real = double>
ComplexMatrix<Real> random_psd_matrix(Eigen::Index dim, std::uint64_t seed, Real scale = Real(1)) {
  SplitMix64 rng(seed);
  ComplexMatrix<Real> g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      g(i, j) = Complex<Real>(Real(re), Real(im));
    }
  ComplexMatrix<Real> m = g * g.adjoint();
  m = (m + m.adjoint()).eval() / Real(2);
  const Real norm = operator_norm(m);
  if (norm > 0) m *= scale / norm;
  return m;
}

/// Seeded matrix with operator norm `norm` (a strict contraction for norm < 1).
template <typename Real = double>
ComplexMatrix<Real> random_matrix(Eigen::Index dim, std::uint64_t seed, Real norm) {
  SplitMix64 rng(seed);
  ComplexMatrix<Real> g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      g(i, j) = Complex<Real>(Real(re), Real(im));
    }
  return g * (norm / operator_norm(g));
}

}  // namespace katolab
