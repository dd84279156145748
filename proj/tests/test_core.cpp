#include <gtest/gtest.h>

#include <cmath>

#include "projspec/core.hpp"
#include "test_support.hpp"

using namespace projspec;
using namespace projspec::testing;

namespace {

void expect_error(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// Eigenvector equality up to a unimodular phase.
double phase_distance(const CVector& x, const CVector& y) {
  const Cplx overlap = y.dot(x);
  const Cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Cplx(1.0);
  return (x - phase * y).norm();
}

}  // namespace

TEST(NormalityDefect, DiagonalIsNormal) {
  EXPECT_EQ(normality_defect(diag({1.0, Cplx(0, 1)})), 0.0);
}

TEST(NormalityDefect, NilpotentJordanBlock) {
  // A*A − AA* = diag(1, 0) − diag(0, 1) by hand.
  EXPECT_NEAR(normality_defect(mat2(0, 1, 0, 0)), std::sqrt(2.0), 1e-15);
}

TEST(NormalityDefect, HermitianMatricesAreNormal) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix h = random_hermitian(random_dim(rng, 1, 12), rng);
    EXPECT_LE(normality_defect(h), 1e-13 * h.squaredNorm());
  }
}

TEST(EigNormal, DiagonalInput) {
  const auto d = eig_normal(diag({3.0, Cplx(1, 1)}));
  ASSERT_EQ(d.values.size(), 2u);
  EXPECT_EQ(d.values[0], Cplx(3.0));
  EXPECT_EQ(d.values[1], Cplx(1, 1));
  EXPECT_LE((d.unitary - CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(EigNormal, SymmetricTwoByTwo) {
  // Characteristic polynomial (1 − x)² − 4 has roots 3 and −1.
  const auto d = eig_normal(mat2(1, 2, 2, 1));
  EXPECT_NEAR(std::abs(d.values[0] - 3.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d.values[1] + 1.0), 0.0, 1e-14);
  CVector e1(2), e2(2);
  e1 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  e2 << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  EXPECT_LE(phase_distance(d.unitary.col(0), e1), 1e-14);
  EXPECT_LE(phase_distance(d.unitary.col(1), e2), 1e-14);
}

TEST(EigNormal, RejectsNonNormal) {
  expect_error(ErrorCode::NotNormal, [] { eig_normal(mat2(0, 1, 0, 0)); });
}

TEST(EigNormal, RejectsNonSquare) {
  expect_error(ErrorCode::DimMismatch, [] { eig_normal(CMatrix::Zero(2, 3)); });
}

TEST(EigNormal, OrderingTieBreakByArgument) {
  // |λ| all equal: order by Arg ascending in [0, 2π).
  const auto d = eig_normal(diag({Cplx(0, -1), -1.0, Cplx(0, 1), 1.0}));
  EXPECT_EQ(d.values[0], Cplx(1.0));
  EXPECT_EQ(d.values[1], Cplx(0, 1));
  EXPECT_EQ(d.values[2], Cplx(-1.0));
  EXPECT_EQ(d.values[3], Cplx(0, -1));
}

TEST(EigNormal, RandomNormalRoundTrip) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = random_dim(rng, 1, 24);
    const CMatrix a = random_normal(n, rng);
    const auto d = eig_normal(a);
    CVector vals(n);
    for (Index i = 0; i < n; ++i) vals(i) = d.values[static_cast<std::size_t>(i)];
    EXPECT_LE((a - conjugate_diag(d.unitary, vals)).norm(), 1e-10 * a.norm());
    EXPECT_LE((d.unitary.adjoint() * d.unitary - CMatrix::Identity(n, n)).norm(), 1e-10);
    for (std::size_t i = 1; i < d.values.size(); ++i)
      EXPECT_GE(std::abs(d.values[i - 1]) + 1e-12 * a.norm(), std::abs(d.values[i]));
  }
}

TEST(EigNormal, DegenerateHermitianPartIsSeparated) {
  // Eigenvalues ±i share real part 0: the skew-Hermitian stage must split them.
  Rng rng(3);
  const CMatrix u = random_unitary(4, rng);
  CVector d(4);
  d << Cplx(0, 1), Cplx(0, -1), Cplx(2, 1), Cplx(2, -3);
  const CMatrix a = conjugate_diag(u, d);
  const auto e = eig_normal(a);
  EXPECT_LE(e.residual, 1e-12 * a.norm());
  std::vector<Cplx> got = e.values;
  EXPECT_NEAR(std::abs(got[0] - Cplx(2, -3)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(got[1] - Cplx(2, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(got[2] - Cplx(0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(got[3] - Cplx(0, -1)), 0.0, 1e-12);
}

TEST(EigNormal, RepeatedEigenvalues) {
  Rng rng(5);
  const CMatrix u = random_unitary(6, rng);
  CVector d(6);
  d << 2.0, 2.0, 2.0, Cplx(0, 1), Cplx(0, 1), -1.0;
  const CMatrix a = conjugate_diag(u, d);
  const auto e = eig_normal(a);
  EXPECT_LE(e.residual, 1e-10 * a.norm());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(e.values[static_cast<std::size_t>(i)] - 2.0), 0.0, 1e-12);
}

TEST(EigNormal, ZeroMatrix) {
  const auto e = eig_normal(CMatrix::Zero(3, 3));
  for (const auto& v : e.values) EXPECT_EQ(v, Cplx(0.0));
  EXPECT_EQ(e.residual, 0.0);
}

TEST(Commutator, DiagonalPairsCommute) {
  EXPECT_EQ(commutator_norm(diag({1.0, 2.0}), diag({3.0, 4.0})), 0.0);
}

TEST(Commutator, PauliPair) {
  // σ_z σ_x − σ_x σ_z = [[0, 2], [−2, 0]] by direct multiplication.
  EXPECT_NEAR(commutator_norm(pauli_z(), pauli_x()), 2.0 * std::sqrt(2.0), 1e-15);
}

TEST(Commutator, PowersCommuteAndSymmetry) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = random_dim(rng, 1, 10);
    const CMatrix a = gaussian_matrix(n, rng);
    EXPECT_LE(commutator_norm(a, a * a), 1e-12 * a.norm() * a.norm() * a.norm());
    const CMatrix b = gaussian_matrix(n, rng);
    EXPECT_EQ(commutator_norm(a, b), commutator_norm(b, a));
  }
}

TEST(Commutator, SimultaneousDiagonalPairs) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = random_dim(rng, 1, 12);
    const CVector d1 = random_diagonal(n, rng), d2 = random_diagonal(n, rng);
    EXPECT_LE(commutator_norm(CMatrix(d1.asDiagonal()), CMatrix(d2.asDiagonal())), 1e-12);
  }
}

TEST(Commutator, DimMismatch) {
  expect_error(ErrorCode::DimMismatch,
               [] { commutator_norm(CMatrix::Zero(2, 2), CMatrix::Zero(3, 3)); });
}

TEST(OperatorNorm, MatchesLargestSingularValue) {
  EXPECT_NEAR(operator_norm(diag({2.0, Cplx(0, -5), 1.0})), 5.0, 1e-13);
  // [[0,1],[0,0]] has singular values 1 and 0.
  EXPECT_NEAR(operator_norm(mat2(0, 1, 0, 0)), 1.0, 1e-14);
}

TEST(OperatorTuple, Validation) {
  expect_error(ErrorCode::InvalidArgument, [] { OperatorTuple(std::vector<CMatrix>{}); });
  expect_error(ErrorCode::DimMismatch, [] {
    OperatorTuple(std::vector<CMatrix>{CMatrix::Zero(2, 2), CMatrix::Zero(3, 3)});
  });
  const OperatorTuple t(std::vector<CMatrix>{pauli_x(), pauli_z()});
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.dim(), 2);
}
