#include <gtest/gtest.h>

#include "katolab/random.hpp"
#include "katolab/spectral.hpp"
#include "oracles.hpp"

using namespace katolab;
using oracle::cd;

namespace {

double max_abs(const ComplexMatrixd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Eigendecompose, DiagonalMatrix) {
  ComplexMatrixd m = ComplexMatrixd::Zero(3, 3);
  m(0, 0) = 2.0;
  m(1, 1) = 0.5;
  m(2, 2) = 1.0;
  const auto op = hermitian_eigendecompose(m);
  ASSERT_EQ(op.dim(), 3);
  EXPECT_NEAR(op.eigenvalues()(0), 0.5, 1e-15);
  EXPECT_NEAR(op.eigenvalues()(1), 1.0, 1e-15);
  EXPECT_NEAR(op.eigenvalues()(2), 2.0, 1e-15);
  EXPECT_NEAR(op.spectral_radius(), 2.0, 1e-15);
  EXPECT_LT(max_abs(op.matrix() - m), 1e-15);
}

TEST(Eigendecompose, MatchesCharacteristicPolynomialRoots) {
  for (unsigned seed : {1u, 2u, 3u}) {
    const oracle::Mat m = oracle::psd_matrix(6, seed);
    const auto roots = oracle::hermitian_eigenvalues(m);
    const auto op = hermitian_eigendecompose(ComplexMatrixd(m));
    ASSERT_EQ(roots.size(), 6u) << "seed " << seed;
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(op.eigenvalues()(j), roots[static_cast<std::size_t>(j)], 1e-10);
  }
}

TEST(Eigendecompose, ReconstructsInput) {
  const ComplexMatrixd m = random_psd_matrix<double>(10, 77, 3.0);
  const auto op = hermitian_eigendecompose(m);
  EXPECT_LT(max_abs(op.matrix() - m), 1e-13);
  const ComplexMatrixd vv = op.eigenbasis().adjoint() * op.eigenbasis();
  EXPECT_LT(max_abs(vv - ComplexMatrixd::Identity(10, 10)), 1e-13);
}

TEST(Eigendecompose, RejectsNonHermitian) {
  ComplexMatrixd m = ComplexMatrixd::Identity(2, 2);
  m(0, 1) = cd(0.5, 0.0);
  try {
    hermitian_eigendecompose(m);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotHermitian);
  }
}

TEST(Eigendecompose, RejectsNegativeSpectrum) {
  ComplexMatrixd m = ComplexMatrixd::Identity(2, 2);
  m(1, 1) = -1e-3;
  try {
    hermitian_eigendecompose(m);
    FAIL() << "expected NotPSD";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPSD);
    ASSERT_TRUE(e.value().has_value());
    EXPECT_NEAR(*e.value(), -1e-3, 1e-15);
  }
}

TEST(Eigendecompose, ClampsRoundoffNegatives) {
  set_warnings_enabled(false);
  ComplexMatrixd m = ComplexMatrixd::Identity(2, 2);
  m(1, 1) = -1e-12;
  const auto op = hermitian_eigendecompose(m);
  set_warnings_enabled(true);
  EXPECT_EQ(op.clamped_count(), 1);
  EXPECT_EQ(op.eigenvalues()(0), 0.0);
}

TEST(Eigendecompose, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(hermitian_eigendecompose(ComplexMatrixd::Zero(2, 3)), Error);
  ComplexMatrixd m = ComplexMatrixd::Identity(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(hermitian_eigendecompose(m), Error);
}

TEST(Eigendecompose, LongDoubleInstantiation) {
  const ComplexMatrixd m = random_psd_matrix<double>(5, 9);
  const auto op_d = hermitian_eigendecompose(m);
  const auto op_l = hermitian_eigendecompose_as<long double>(m);
  for (int j = 0; j < 5; ++j)
    EXPECT_NEAR(static_cast<double>(op_l.eigenvalues()(j)), op_d.eigenvalues()(j), 1e-13);
}

TEST(UnitaryGroup, MatchesTaylorSeries) {
  const ComplexMatrixd a = random_psd_matrix<double>(6, 5, 2.0);
  const auto op = hermitian_eigendecompose(a);
  for (double t : {-3.0, 0.1, 1.0, 7.5}) {
    const oracle::Mat expected = oracle::expm_series(cd(0, -t) * oracle::Mat(a));
    EXPECT_LT(max_abs(unitary_group(op, t) - expected), 1e-12) << "t = " << t;
  }
}

TEST(UnitaryGroup, IsUnitaryAndAGroup) {
  const auto op = hermitian_eigendecompose(random_psd_matrix<double>(8, 11, 5.0));
  const ComplexMatrixd u = unitary_group(op, 0.7);
  EXPECT_LT(max_abs(u * u.adjoint() - ComplexMatrixd::Identity(8, 8)), 1e-13);
  EXPECT_LT(max_abs(unitary_group(op, 0.3) * unitary_group(op, 0.4) - u), 1e-13);
  EXPECT_LT(max_abs(unitary_group(op, 0.0) - ComplexMatrixd::Identity(8, 8)), 1e-15);
}

TEST(ContractionSemigroup, MatchesTaylorSeries) {
  const ComplexMatrixd a = random_psd_matrix<double>(5, 6, 3.0);
  const auto op = hermitian_eigendecompose(a);
  for (double t : {0.0, 0.25, 2.0}) {
    const oracle::Mat expected = oracle::expm_series(-t * oracle::Mat(a));
    EXPECT_LT(max_abs(contraction_semigroup(op, t) - expected), 1e-12);
  }
  EXPECT_LE(operator_norm(contraction_semigroup(op, 1.0)), 1.0 + 1e-14);
}

TEST(Resolvent, InvertsIPlusZA) {
  const ComplexMatrixd a = random_psd_matrix<double>(6, 12, 4.0);
  const auto op = hermitian_eigendecompose(a);
  const ComplexMatrixd id = ComplexMatrixd::Identity(6, 6);
  for (cd z : {cd(0.5, 0), cd(0, 2.0), cd(1.0, -3.0)}) {
    const ComplexMatrixd r = resolvent(op, z);
    EXPECT_LT(max_abs((id + z * a) * r - id), 1e-12);
  }
}

TEST(Resolvent, SingularPoint) {
  ComplexMatrixd m = ComplexMatrixd::Zero(2, 2);
  m(0, 0) = 2.0;
  const auto op = hermitian_eigendecompose(m);
  try {
    resolvent(op, cd(-0.5, 0));
    FAIL() << "expected SingularResolvent";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingularResolvent);
  }
}

TEST(MatrixPower, MatchesRepeatedProduct) {
  const ComplexMatrixd m = random_matrix<double>(5, 3, 0.9);
  ComplexMatrixd expected = m;
  for (int n = 1; n <= 37; ++n) {
    EXPECT_LT(max_abs(matrix_power(m, n) - expected), 1e-13) << "n = " << n;
    expected = expected * m;
  }
  EXPECT_THROW(matrix_power(m, 0), Error);
}

TEST(OperatorNorm, AgreesWithPowerIteration) {
  for (unsigned seed : {4u, 5u}) {
    const oracle::Mat m = oracle::psd_matrix(7, seed) * cd(0.3, 0.2) + oracle::Mat::Identity(7, 7);
    EXPECT_NEAR(operator_norm(ComplexMatrixd(m)), oracle::op_norm(m), 1e-10);
  }
}

TEST(ApplyScalarFunction, ReportsUndefinedEigenvalue) {
  ComplexMatrixd m = ComplexMatrixd::Zero(2, 2);
  m(1, 1) = 1.0;
  const auto op = hermitian_eigendecompose(m);
  try {
    apply_scalar_function(op, [](double l) { return cd(1.0 / (l - 1.0), 0); });
    FAIL() << "expected FunctionUndefinedAtSpectrum";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FunctionUndefinedAtSpectrum);
    EXPECT_EQ(e.value().value_or(-1), 1.0);
  }
}

TEST(RandomPsd, DeterministicAndScaled) {
  const ComplexMatrixd a = random_psd_matrix<double>(8, 42, 2.5);
  const ComplexMatrixd b = random_psd_matrix<double>(8, 42, 2.5);
  EXPECT_EQ(max_abs(a - b), 0.0);
  const auto op = hermitian_eigendecompose(a);
  EXPECT_NEAR(op.spectral_radius(), 2.5, 1e-12);
  EXPECT_GE(op.eigenvalues().minCoeff(), 0.0);
  EXPECT_GT(max_abs(a - random_psd_matrix<double>(8, 43, 2.5)), 1e-3);
}

TEST(Random, SplitMixReferenceValues) {
  // First outputs of SplitMix64 seeded with 0 (published reference sequence).
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

TEST(Random, DerivedStreamsDiffer) {
  EXPECT_EQ(derive_seed(42, 0), 42u);
  EXPECT_NE(derive_seed(42, 1), derive_seed(42, 2));
  EXPECT_NE(derive_seed(42, 1), derive_seed(43, 1));
  SplitMix64 rng(derive_seed(42, 1));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
