#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "projspec/error.hpp"
#include "projspec/tolerances.hpp"

namespace projspec {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Argument of z in [0, 2π). Values that round to 2π are folded onto 0.
inline double arg_2pi(Cplx z) {
  double a = std::atan2(z.imag(), z.real());
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

inline double frobenius(const CMatrix& a) { return a.norm(); }

inline void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimMismatch, std::string(who) + ": matrix is " +
                                            std::to_string(a.rows()) + "x" +
                                            std::to_string(a.cols()) + ", expected square");
  }
  if (a.rows() == 0) throw Error(ErrorCode::InvalidArgument, std::string(who) + ": empty matrix");
}

inline void require_same_dim(const CMatrix& a, const CMatrix& b, const char* who) {
  require_square(a, who);
  require_square(b, who);
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::DimMismatch, std::string(who) + ": dimensions " +
                                            std::to_string(a.rows()) + " and " +
                                            std::to_string(b.rows()) + " differ");
  }
}

/// ‖A*A − AA*‖_F
inline double normality_defect(const CMatrix& a) {
  require_square(a, "normality_defect");
  return (a.adjoint() * a - a * a.adjoint()).norm();
}

/// ‖AB − BA‖_F
inline double commutator_norm(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "commutator_norm");
  return (a * b - b * a).norm();
}

inline bool is_normal(const CMatrix& a, const Tolerances& tol = {}) {
  const double scale = frobenius(a);
  return normality_defect(a) <= tol.normal * scale * scale;
}

/// A nonempty sequence of square matrices sharing one dimension.
class OperatorTuple {
 public:
  explicit OperatorTuple(std::vector<CMatrix> mats) : mats_(std::move(mats)) {
    if (mats_.empty()) throw Error(ErrorCode::InvalidArgument, "operator tuple is empty");
    for (const auto& m : mats_) {
      require_same_dim(mats_.front(), m, "OperatorTuple");
      if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
    }
  }

  std::size_t size() const { return mats_.size(); }
  Index dim() const { return mats_.front().rows(); }
  const CMatrix& operator[](std::size_t i) const { return mats_[i]; }
  std::span<const CMatrix> mats() const { return mats_; }

 private:
  std::vector<CMatrix> mats_;
};

struct EigenDecomp {
  CMatrix unitary;            // columns are eigenvectors
  std::vector<Cplx> values;   // matching eigenvalues
  double residual = 0.0;      // ‖A − U·diag(values)·U*‖_F
};

namespace detail {

struct HermitianEigen {
  Eigen::VectorXd values;
  CMatrix vectors;
};

// Cyclic complex Jacobi. Each rotation first removes the phase of the pivot,
// then applies the real symmetric rotation that annihilates it.
inline HermitianEigen jacobi_hermitian(const CMatrix& input, int max_sweeps = 60) {
  const Index n = input.rows();
  CMatrix m = (input + input.adjoint()) * 0.5;
  CMatrix v = CMatrix::Identity(n, n);
  const double scale = m.norm();
  const double target = 1e-15 * scale;

  auto off_norm = [&] {
    double off = 0.0;
    for (Index q = 1; q < n; ++q)
      for (Index p = 0; p < q; ++p) off += std::norm(m(p, q));
    return std::sqrt(2.0 * off);
  };

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= target) {
      converged = true;
      break;
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Cplx apq = m(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = m(p, p).real();
        const double aqq = m(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Cplx phase = std::conj(apq / mag);
        // V = diag(1, phase) · [[c, s], [-s, c]]
        const Cplx vpp = c, vpq = s, vqp = -s * phase, vqq = c * phase;
        for (Index k = 0; k < n; ++k) {
          const Cplx mkp = m(k, p), mkq = m(k, q);
          m(k, p) = mkp * vpp + mkq * vqp;
          m(k, q) = mkp * vpq + mkq * vqq;
        }
        for (Index k = 0; k < n; ++k) {
          const Cplx mpk = m(p, k), mqk = m(q, k);
          m(p, k) = std::conj(vpp) * mpk + std::conj(vqp) * mqk;
          m(q, k) = std::conj(vpq) * mpk + std::conj(vqq) * mqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        m(p, p) = m(p, p).real();
        m(q, q) = m(q, q).real();
        for (Index k = 0; k < n; ++k) {
          const Cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * vpp + vkq * vqp;
          v(k, q) = vkp * vpq + vkq * vqq;
        }
      }
    }
  }
  if (!converged && off_norm() > target) {
    throw Error(ErrorCode::NoConvergence, "Jacobi sweep budget exhausted");
  }
  HermitianEigen out;
  out.values = m.diagonal().real();
  out.vectors = std::move(v);
  return out;
}

// Sorts `idx` in place by key, then re-sorts every run of keys closer than
// `tie` by the secondary comparator. Keeps the ordering a strict weak order.
template <class Key, class Tie>
void sort_with_ties(std::vector<std::size_t>& idx, Key key, double tie, Tie secondary) {
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::size_t start = 0;
  while (start < idx.size()) {
    std::size_t end = start + 1;
    while (end < idx.size() && key(idx[end]) - key(idx[start]) <= tie) ++end;
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                     idx.begin() + static_cast<std::ptrdiff_t>(end), secondary);
    start = end;
  }
}

}  // namespace detail

/// Deterministic eigenvalue order: |λ| descending, then Arg ascending, then
/// original index. Magnitudes within `tie` of each other count as equal.
inline std::vector<std::size_t> eigen_order(std::span<const Cplx> values, double tie) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const double arg_tie = 1e-12;
  detail::sort_with_ties(
      idx, [&](std::size_t i) { return -std::abs(values[i]); }, tie,
      [&](std::size_t a, std::size_t b) {
        const double da = arg_2pi(values[a]), db = arg_2pi(values[b]);
        if (std::abs(da - db) <= arg_tie) return a < b;
        return da < db;
      });
  return idx;
}

/// Eigendecomposition of a normal matrix. The Hermitian part is diagonalized
/// first; inside each of its eigenvalue clusters the compressed
/// skew-Hermitian part separates the eigenvalues.
inline EigenDecomp eig_normal(const CMatrix& a, const Tolerances& tol = {}) {
  require_square(a, "eig_normal");
  if (!a.allFinite()) throw Error(ErrorCode::InvalidArgument, "eig_normal: non-finite entry");
  const Index n = a.rows();
  const double scale = frobenius(a);
  const double defect = normality_defect(a);
  if (defect > tol.normal * scale * scale) {
    throw Error(ErrorCode::NotNormal,
                "normality defect " + std::to_string(defect) + " exceeds tolerance");
  }

  const CMatrix herm = (a + a.adjoint()) * 0.5;
  const CMatrix skew = (a - a.adjoint()) * Cplx(0.0, -0.5);
  auto stage1 = detail::jacobi_hermitian(herm);
  CMatrix u = std::move(stage1.vectors);

  std::vector<Index> by_h(static_cast<std::size_t>(n));
  std::iota(by_h.begin(), by_h.end(), Index{0});
  std::stable_sort(by_h.begin(), by_h.end(),
                   [&](Index x, Index y) { return stage1.values(x) < stage1.values(y); });

  const double cluster_radius = 1e-8 * scale;
  std::size_t start = 0;
  while (start < by_h.size()) {
    std::size_t end = start + 1;
    while (end < by_h.size() &&
           stage1.values(by_h[end]) - stage1.values(by_h[end - 1]) <= cluster_radius)
      ++end;
    if (end - start > 1) {
      const auto k = static_cast<Index>(end - start);
      CMatrix block(n, k);
      for (Index j = 0; j < k; ++j) block.col(j) = u.col(by_h[start + static_cast<std::size_t>(j)]);
      const CMatrix compressed = block.adjoint() * skew * block;
      const auto stage2 = detail::jacobi_hermitian(compressed);
      const CMatrix rotated = block * stage2.vectors;
      for (Index j = 0; j < k; ++j) u.col(by_h[start + static_cast<std::size_t>(j)]) = rotated.col(j);
    }
    start = end;
  }

  const CMatrix t = u.adjoint() * a * u;
  std::vector<Cplx> raw(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = t(i, i);

  const auto order = eigen_order(raw, 1e-12 * std::max(scale, 1e-300));
  EigenDecomp out;
  out.unitary.resize(n, n);
  out.values.resize(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    out.unitary.col(j) = u.col(static_cast<Index>(src));
    out.values[static_cast<std::size_t>(j)] = raw[src];
  }

  CVector d(n);
  for (Index j = 0; j < n; ++j) d(j) = out.values[static_cast<std::size_t>(j)];
  out.residual = (a - out.unitary * d.asDiagonal() * out.unitary.adjoint()).norm();
  const double unitary_defect =
      (out.unitary.adjoint() * out.unitary - CMatrix::Identity(n, n)).norm();
  if (unitary_defect > tol.unitary) {
    throw Error(ErrorCode::NoConvergence, "eigenvector basis lost unitarity");
  }
  if (out.residual > tol.eig * scale) {
    throw Error(ErrorCode::NoConvergence,
                "decomposition residual " + std::to_string(out.residual) + " exceeds tolerance");
  }
  return out;
}

/// Largest singular value, from the eigenvalues of B*B.
inline double operator_norm(const CMatrix& b, const Tolerances& tol = {}) {
  require_square(b, "operator_norm");
  if (frobenius(b) == 0.0) return 0.0;
  const CMatrix gram = b.adjoint() * b;
  const auto decomp = eig_normal(gram, tol);
  return std::sqrt(std::max(0.0, decomp.values.front().real()));
}

/// Conjugate-linear inner product ⟨x, y⟩ = y* x.
inline Cplx inner(const CVector& x, const CVector& y) { return y.dot(x); }

}  // namespace projspec
