#include <gtest/gtest.h>

#include "projspec/commute.hpp"
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

LineArrangement arrangement(std::initializer_list<std::pair<Cplx, Cplx>> pairs) {
  LineArrangement arr;
  for (const auto& [l, m] : pairs) arr.lines.push_back({{l, m}, 1});
  return arr;
}

void check_basis(const CommonEigenbasis& basis, const CMatrix& a, const CMatrix& b) {
  const Index n = a.rows();
  EXPECT_LE((basis.unitary.adjoint() * basis.unitary - CMatrix::Identity(n, n)).norm(), 1e-10);
  EXPECT_LE(basis.offdiag_residual, 1e-8 * (a.norm() + b.norm()));
  CVector da(n), db(n);
  for (Index i = 0; i < n; ++i) {
    da(i) = basis.diag_a[static_cast<std::size_t>(i)];
    db(i) = basis.diag_b[static_cast<std::size_t>(i)];
  }
  EXPECT_LE((conjugate_diag(basis.unitary, da) - a).norm(), 1e-8 * (1.0 + a.norm()));
  EXPECT_LE((conjugate_diag(basis.unitary, db) - b).norm(), 1e-8 * (1.0 + b.norm()));
}

}  // namespace

TEST(EquivalenceCheck, CommutingPauliXWithSymmetric) {
  // Common eigenvectors (1, ±1)/√2 give p = (1 + z + 3w)(1 − z − w).
  const auto rep = equivalence_check(pauli_x(), mat2(1, 2, 2, 1));
  EXPECT_TRUE(rep.commute);
  ASSERT_TRUE(rep.verdict && rep.verdict->is_lines());
  EXPECT_LE(compare_arrangements(rep.verdict->arrangement(), arrangement({{1.0, 3.0}, {-1.0, -1.0}})), 1e-10);
  EXPECT_TRUE(rep.consistent);
  EXPECT_LE(rep.arrangement_distance, 1e-10);
}

TEST(EquivalenceCheck, PauliPairIsConsistentNegative) {
  const auto rep = equivalence_check(pauli_z(), pauli_x());
  EXPECT_FALSE(rep.commute);
  ASSERT_TRUE(rep.verdict);
  EXPECT_FALSE(rep.verdict->is_lines());
  EXPECT_TRUE(rep.consistent);
}

TEST(EquivalenceCheck, ZeroPair) {
  const auto rep = equivalence_check(CMatrix::Zero(3, 3), CMatrix::Zero(3, 3));
  EXPECT_TRUE(rep.commute);
  ASSERT_TRUE(rep.verdict && rep.verdict->is_lines());
  EXPECT_TRUE(rep.verdict->arrangement().lines.empty());
  EXPECT_TRUE(rep.consistent);
}

TEST(EquivalenceCheck, CommonKernelLeavesDegreeDeficit) {
  const auto rep = equivalence_check(diag({0.0, 1.0, 2.0}), diag({0.0, Cplx(0, 1), 3.0}));
  ASSERT_TRUE(rep.verdict && rep.verdict->is_lines());
  EXPECT_EQ(rep.verdict->degree_deficit, 1);
  EXPECT_TRUE(rep.consistent);
}

TEST(EquivalenceCheck, RejectsNonNormal) {
  expect_error(ErrorCode::NotNormal, [] { equivalence_check(mat2(0, 1, 0, 0), pauli_x()); });
}

TEST(EquivalenceCheck, RandomPairsAreConsistent) {
  Rng rng(107);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = random_dim(rng, 2, 12);
    const auto c = commuting_pair(n, rng);
    const auto rc = equivalence_check(c.a, c.b);
    EXPECT_EQ(rc.status, Outcome::Decided) << rc.reason;
    EXPECT_TRUE(rc.commute);
    EXPECT_TRUE(rc.consistent);
    // Arrangement–eigenpair duality against the generator's own diagonals.
    LineArrangement truth;
    for (Index i = 0; i < n; ++i) truth.lines.push_back({{c.da(i), c.db(i)}, 1});
    EXPECT_LE(compare_arrangements(rc.verdict->arrangement(), truth), 1e-6);

    const auto nc = noncommuting_pair(n, rng);
    const auto rn = equivalence_check(nc.a, nc.b);
    EXPECT_EQ(rn.status, Outcome::Decided) << rn.reason;
    EXPECT_FALSE(rn.commute);
    EXPECT_TRUE(rn.consistent);
  }
}

TEST(CommonEigenbasis, SharedEigenspaceIsRotated) {
  const CMatrix a = diag({1.0, 1.0, 2.0});
  CMatrix b = CMatrix::Zero(3, 3);
  b.topLeftCorner(2, 2) = pauli_x();
  b(2, 2) = 5.0;
  const auto basis = common_eigenbasis(a, b);
  check_basis(basis, a, b);
  std::vector<double> da, db;
  for (const auto& v : basis.diag_a) da.push_back(v.real());
  for (const auto& v : basis.diag_b) db.push_back(v.real());
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  EXPECT_NEAR(da[0], 1.0, 1e-14);
  EXPECT_NEAR(da[1], 1.0, 1e-14);
  EXPECT_NEAR(da[2], 2.0, 1e-14);
  EXPECT_NEAR(db[0], -1.0, 1e-14);
  EXPECT_NEAR(db[1], 1.0, 1e-14);
  EXPECT_NEAR(db[2], 5.0, 1e-14);
}

TEST(CommonEigenbasis, DiagonalInputsGivePermutation) {
  const CMatrix a = diag({1.0, 3.0, 2.0}), b = diag({4.0, 5.0, 6.0});
  const auto basis = common_eigenbasis(a, b);
  check_basis(basis, a, b);
  EXPECT_LE((basis.unitary.cwiseAbs().rowwise().sum() - Eigen::VectorXd::Ones(3)).norm(), 1e-14);
  EXPECT_EQ(basis.diag_a[0], Cplx(3.0));
}

TEST(CommonEigenbasis, IdentityReducesToEigOfB) {
  Rng rng(109);
  const CMatrix b = random_normal(5, rng);
  const auto basis = common_eigenbasis(CMatrix::Identity(5, 5), b);
  check_basis(basis, CMatrix::Identity(5, 5), b);
  const auto e = eig_normal(b);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(basis.diag_b[i] - e.values[i]), 0.0, 1e-10);
}

TEST(CommonEigenbasis, RandomRoundTripAndErrors) {
  Rng rng(113);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = commuting_pair(random_dim(rng, 1, 16), rng);
    check_basis(common_eigenbasis(c.a, c.b), c.a, c.b);
  }
  expect_error(ErrorCode::NotCommuting, [] { common_eigenbasis(pauli_z(), pauli_x()); });
  expect_error(ErrorCode::NotNormal, [] { common_eigenbasis(mat2(0, 1, 0, 0), pauli_x()); });
}

TEST(CommonEigenbasis, DegenerateClustersInBothMatrices) {
  Rng rng(127);
  const CMatrix u = random_unitary(6, rng);
  CVector da(6), db(6);
  da << 1.0, 1.0, 1.0, 2.0, 2.0, 0.0;
  db << 3.0, 3.0, -1.0, 0.0, 4.0, 0.0;
  const CMatrix a = conjugate_diag(u, da), b = conjugate_diag(u, db);
  check_basis(common_eigenbasis(a, b), a, b);
  const auto rep = equivalence_check(a, b);
  EXPECT_TRUE(rep.consistent);
  ASSERT_TRUE(rep.verdict && rep.verdict->is_lines());
  EXPECT_EQ(rep.verdict->degree_deficit, 1);
  EXPECT_EQ(rep.verdict->arrangement().total_multiplicity(), 5);
}

TEST(TupleTest, DiagonalTriple) {
  const OperatorTuple t(std::vector<CMatrix>{diag({1.0, 2.0}), diag({3.0, 4.0}), diag({5.0, 6.0})});
  const auto rep = tuple_test(t);
  EXPECT_TRUE(rep.commutative);
  EXPECT_TRUE(rep.consistent);
  EXPECT_EQ(rep.pairs.size(), 3u);
  ASSERT_EQ(rep.hyperplanes.size(), 2u);
  std::vector<std::vector<double>> got;
  for (const auto& h : rep.hyperplanes) {
    got.push_back({});
    for (const auto& c : h.coeffs) got.back().push_back(c.real());
  }
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got[0], (std::vector<double>{1, 3, 5}));
  EXPECT_EQ(got[1], (std::vector<double>{2, 4, 6}));
}

TEST(TupleTest, PauliTripleFails) {
  const OperatorTuple t(std::vector<CMatrix>{pauli_z(), pauli_x(), pauli_z()});
  const auto rep = tuple_test(t);
  EXPECT_FALSE(rep.commutative);
  EXPECT_TRUE(rep.consistent);
  EXPECT_FALSE(rep.pairs[0].report.commute);
  EXPECT_TRUE(rep.pairs[1].report.commute);
  EXPECT_FALSE(rep.pairs[2].report.commute);
  EXPECT_TRUE(rep.hyperplanes.empty());
}

TEST(TupleTest, Singleton) {
  const OperatorTuple t(std::vector<CMatrix>{diag({2.0, Cplx(0, 1), 0.0})});
  const auto rep = tuple_test(t);
  EXPECT_TRUE(rep.commutative);
  EXPECT_TRUE(rep.pairs.empty());
  ASSERT_EQ(rep.hyperplanes.size(), 2u);
  EXPECT_EQ(rep.hyperplanes[0].coeffs, std::vector<Cplx>{2.0});
}

TEST(TupleTest, RandomCommutingTuple) {
  Rng rng(131);
  const CMatrix u = random_unitary(6, rng);
  std::vector<CMatrix> mats;
  for (int i = 0; i < 4; ++i) mats.push_back(conjugate_diag(u, random_diagonal(6, rng)));
  const auto rep = tuple_test(OperatorTuple(mats));
  EXPECT_TRUE(rep.commutative);
  EXPECT_TRUE(rep.consistent);
  EXPECT_EQ(rep.hyperplanes.size(), 6u);
  // Every hyperplane point with only z_i nonzero lies in σ_p: det(I + z_i A_i) = 0 at z_i = −1/c_i.
  for (const auto& h : rep.hyperplanes) {
    const Cplx z = -1.0 / h.coeffs[2];
    EXPECT_LE(std::abs((CMatrix::Identity(6, 6) + z * mats[2]).determinant()), 1e-8);
  }
}

TEST(RestrictionCheck, SharedEigenplane) {
  Rng rng(137);
  const auto c = commuting_pair(5, rng);
  const auto basis = common_eigenbasis(c.a, c.b);
  const CMatrix w = basis.unitary.leftCols(2);
  const auto rep = restriction_check(c.a, c.b, w);
  EXPECT_TRUE(rep.commute);
  EXPECT_TRUE(rep.consistent);
  ASSERT_TRUE(rep.verdict->is_lines());
  LineArrangement want;
  for (std::size_t i = 0; i < 2; ++i) want.lines.push_back({{basis.diag_a[i], basis.diag_b[i]}, 1});
  EXPECT_LE(compare_arrangements(rep.verdict->arrangement(), want), 1e-6);
}

TEST(RestrictionCheck, FullSpaceAndErrors) {
  const CMatrix b = mat2(1, 2, 2, 1);
  const auto full = restriction_check(pauli_x(), b, CMatrix::Identity(2, 2));
  const auto direct = equivalence_check(pauli_x(), b);
  EXPECT_EQ(emit_equivalence_report(full), emit_equivalence_report(direct));
  expect_error(ErrorCode::InvalidArgument, [&] { restriction_check(pauli_x(), b, CMatrix(2, 0)); });
  CMatrix e1 = CMatrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  expect_error(ErrorCode::NotInvariant, [&] { restriction_check(pauli_x(), b, e1); });
}

TEST(RestrictionCheck, InvariantCoordinateSubspacesStayConsistent) {
  Rng rng(139);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = random_dim(rng, 2, 8);
    const auto c = commuting_pair(n, rng);
    const auto basis = common_eigenbasis(c.a, c.b);
    const Index k = random_dim(rng, 1, n);
    const auto rep = restriction_check(c.a, c.b, basis.unitary.rightCols(k));
    EXPECT_TRUE(rep.consistent);
  }
}

TEST(Report, StableKeyOrder) {
  const auto text = emit_equivalence_report(equivalence_check(pauli_z(), pauli_x()));
  EXPECT_EQ(text.rfind("status=decided\ncommute=false\ncommutator_norm=", 0), 0u);
  EXPECT_NE(text.find("verdict=notlines\nconsistent=true\n"), std::string::npos);
  const auto lines = emit_equivalence_report(equivalence_check(pauli_x(), mat2(1, 2, 2, 1)));
  EXPECT_NE(lines.find("verdict=lines\nconsistent=true\n"), std::string::npos);
  EXPECT_NE(lines.find("lines=\nlines 2\n"), std::string::npos);
}
