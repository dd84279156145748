#pragma once

#include <Eigen/QR>

#include <random>
#include <vector>

#include "projspec/core.hpp"

namespace projspec::testing {

using Rng = std::mt19937_64;

inline Cplx gaussian_cplx(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

inline CMatrix gaussian_matrix(Index n, Rng& rng) {
  CMatrix m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = gaussian_cplx(rng);
  return m;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with R's phases removed.
inline CMatrix random_unitary(Index n, Rng& rng) {
  const CMatrix g = gaussian_matrix(n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Cplx d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline CVector random_diagonal(Index n, Rng& rng) {
  CVector d(n);
  for (Index i = 0; i < n; ++i) d(i) = gaussian_cplx(rng);
  return d;
}

inline CMatrix conjugate_diag(const CMatrix& u, const CVector& d) {
  return u * d.asDiagonal() * u.adjoint();
}

inline CMatrix random_normal(Index n, Rng& rng) {
  const CMatrix u = random_unitary(n, rng);
  return conjugate_diag(u, random_diagonal(n, rng));
}

inline CMatrix random_hermitian(Index n, Rng& rng) {
  const CMatrix g = gaussian_matrix(n, rng);
  return (g + g.adjoint()) * 0.5;
}

struct Pair {
  CMatrix a;
  CMatrix b;
  CVector da;  // eigenvalues of a in the shared basis (commuting pairs only)
  CVector db;
};

/// Common random unitary with independent random diagonals.
inline Pair commuting_pair(Index n, Rng& rng) {
  const CMatrix u = random_unitary(n, rng);
  Pair p;
  p.da = random_diagonal(n, rng);
  p.db = random_diagonal(n, rng);
  p.a = conjugate_diag(u, p.da);
  p.b = conjugate_diag(u, p.db);
  return p;
}

/// Independent normal matrices, rejected unless ‖[A,B]‖_F > margin.
inline Pair noncommuting_pair(Index n, Rng& rng, double margin = 0.1) {
  for (;;) {
    Pair p;
    p.a = random_normal(n, rng);
    p.b = random_normal(n, rng);
    if ((p.a * p.b - p.b * p.a).norm() > margin) return p;
  }
}

inline Index random_dim(Rng& rng, Index lo, Index hi) {
  std::uniform_int_distribution<Index> dist(lo, hi);
  return dist(rng);
}

inline CMatrix diag(std::initializer_list<Cplx> entries) {
  CVector d(static_cast<Index>(entries.size()));
  Index i = 0;
  for (const auto& e : entries) d(i++) = e;
  return d.asDiagonal();
}

inline CMatrix mat2(Cplx a, Cplx b, Cplx c, Cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline CMatrix pauli_x() { return mat2(0, 1, 1, 0); }
inline CMatrix pauli_z() { return mat2(1, 0, 0, -1); }

}  // namespace projspec::testing
