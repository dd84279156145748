#include <gtest/gtest.h>

#include "projspec/matrix_io.hpp"
#include "test_support.hpp"

using namespace projspec;
using namespace projspec::testing;

TEST(MatrixFormat, ParsesScalar) {
  const CMatrix m = parse_matrix("cmatrix 1 1\n2.0+0.0i\n");
  ASSERT_EQ(m.rows(), 1);
  EXPECT_EQ(m(0, 0), Cplx(2.0));
}

TEST(MatrixFormat, ParsesPauliX) {
  const CMatrix m = parse_matrix("cmatrix 2 2\n0+0i 1+0i\n1+0i 0+0i\n");
  EXPECT_EQ(m, pauli_x());
}

TEST(MatrixFormat, CommentsAndExponents) {
  const CMatrix m = parse_matrix("# header comment\ncmatrix 2 2\n  # inside\n1.5-2.25i 1e-3+4E2i\n-0-0i -7.25+0i\n");
  EXPECT_EQ(m(0, 0), Cplx(1.5, -2.25));
  EXPECT_EQ(m(0, 1), Cplx(1e-3, 400.0));
  EXPECT_EQ(m(1, 0), Cplx(-0.0, -0.0));
  EXPECT_EQ(m(1, 1), Cplx(-7.25, 0.0));
}

TEST(MatrixFormat, NonSquareRejected) {
  try {
    parse_matrix("cmatrix 2 1\n1+0i\n2+0i\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
}

TEST(MatrixFormat, ShortRowIsDimMismatch) {
  try {
    parse_matrix("cmatrix 2 2\n1+0i 2+0i\n3+0i\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
}

TEST(MatrixFormat, ParseErrorCarriesPosition) {
  try {
    parse_matrix("cmatrix 2 2\n1+0i 2+0i\n3+0i 4+x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 6);
  }
  for (const char* bad : {"1+i", "1.0", "1+2", "i", "1++2i", "nan+0i", "inf+0i", "1+2ii", "0x1+0i"}) {
    const std::string text = std::string("cmatrix 1 1\n") + bad + "\n";
    EXPECT_THROW(parse_matrix(text), ParseError) << bad;
  }
  EXPECT_THROW(parse_matrix("cmatrix 1 1\n1+0i\n1+0i\n"), ParseError);
  EXPECT_THROW(parse_matrix("matrix 1 1\n1+0i\n"), ParseError);
  EXPECT_THROW(parse_matrix(""), ParseError);
}

TEST(MatrixFormat, RoundTripIsExactForDyadicAndRandomEntries) {
  Rng rng(23);
  std::uniform_int_distribution<int> num(-4096, 4096);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = random_dim(rng, 1, 8);
    CMatrix dyadic(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) dyadic(i, j) = Cplx(num(rng) / 64.0, num(rng) / 1024.0);
    EXPECT_EQ(parse_matrix(emit_matrix(dyadic)), dyadic);
    // 17 significant digits round-trip binary doubles exactly.
    const CMatrix g = gaussian_matrix(n, rng);
    EXPECT_EQ(parse_matrix(emit_matrix(g)), g);
  }
}

TEST(TupleFormat, RoundTripAndValidation) {
  const OperatorTuple t(std::vector<CMatrix>{pauli_x(), pauli_z(), diag({1.0, Cplx(0, 2)})});
  const auto back = parse_tuple(emit_tuple(t));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back[i], t[i]);
  try {
    parse_tuple("ctuple 2\ncmatrix 1 1\n1+0i\ncmatrix 2 2\n1+0i 0+0i\n0+0i 1+0i\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
  EXPECT_THROW(parse_tuple("ctuple 2\ncmatrix 1 1\n1+0i\n"), ParseError);
}
