#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's spectral machinery.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using cld = std::complex<long double>;
using MatL = Eigen::Matrix<cld, Eigen::Dynamic, Eigen::Dynamic>;

/// exp(M) by scaling and squaring around a 40-term Taylor series.
inline Mat expm_series(const Mat& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
  const Mat a = m / std::pow(2.0, squarings);
  Mat term = Mat::Identity(m.rows(), m.cols());
  Mat sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Characteristic polynomial coefficients c_0..c_n of det(lambda I - M)
/// (monic, c_n = 1) by Faddeev-LeVerrier in long double.
inline std::vector<long double> charpoly(const Mat& m) {
  const Eigen::Index n = m.rows();
  MatL a = m.cast<cld>();
  std::vector<long double> c(static_cast<std::size_t>(n) + 1, 0.0L);
  c[static_cast<std::size_t>(n)] = 1.0L;
  MatL mk = MatL::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = a * mk;
    for (Eigen::Index i = 0; i < n; ++i) mk(i, i) += c[static_cast<std::size_t>(n - k + 1)];
    const cld tr = (a * mk).trace();
    c[static_cast<std::size_t>(n - k)] = -tr.real() / static_cast<long double>(k);
  }
  return c;
}

inline long double poly_eval(const std::vector<long double>& c, long double x) {
  long double v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

/// Real roots of the characteristic polynomial of a Hermitian matrix, found
/// by a fine sign-change scan plus bisection. Assumes simple eigenvalues.
inline std::vector<double> hermitian_eigenvalues(const Mat& m, int scan = 200000) {
  const auto c = charpoly(m);
  const double bound = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  std::vector<double> roots;
  long double prev_x = -bound;
  long double prev = poly_eval(c, prev_x);
  for (int i = 1; i <= scan; ++i) {
    const long double x = -bound + 2.0L * bound * i / scan;
    const long double v = poly_eval(c, x);
    if (v == 0) {
      roots.push_back(static_cast<double>(x));
    } else if ((prev < 0) != (v < 0) && prev != 0) {
      long double lo = prev_x, hi = x, flo = prev;
      for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double fm = poly_eval(c, mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(static_cast<double>(0.5L * (lo + hi)));
    }
    prev_x = x;
    prev = v;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Largest singular value by power iteration on M^dagger M.
inline double op_norm(const Mat& m) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(m.cols());
  double lambda = 0;
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXcd w = m.adjoint() * (m * v);
    const double nw = w.norm();
    if (nw == 0) return 0;
    v = w / nw;
    lambda = nw;
  }
  return std::sqrt(lambda);
}

/// Deterministic Hermitian PSD test matrix from a tiny LCG (independent of the
/// library RNG).
inline Mat psd_matrix(int n, unsigned seed) {
  unsigned long long state = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) / 9007199254740992.0 * 2.0 - 1.0;
  };
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cd(next(), next());
  Mat m = g * g.adjoint();
  return (m + m.adjoint()) / 2.0;
}

}  // namespace oracle
