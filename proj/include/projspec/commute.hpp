#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "projspec/core.hpp"
#include "projspec/detpoly.hpp"
#include "projspec/linegeom.hpp"

namespace projspec {

/// Cluster radius for eigenvalues during deflation, relative to ‖M‖_F.
inline constexpr double kDeflationCluster = 1e-7;

/// A unitary that diagonalizes every matrix of a commuting normal family.
struct JointEigenbasis {
  CMatrix unitary;
  std::vector<std::vector<Cplx>> diagonals;  // diagonals[m][k] = (U* M_m U)_kk
  double offdiag_residual = 0.0;             // max_m ‖offdiag(U* M_m U)‖_F
};

struct CommonEigenbasis {
  CMatrix unitary;
  std::vector<Cplx> diag_a;
  std::vector<Cplx> diag_b;
  double offdiag_residual = 0.0;
};

namespace commute_detail {

// Single-linkage clusters of `values` (indices into it) with the given radius,
// in order of first appearance.
inline std::vector<std::vector<Index>> cluster(const std::vector<Cplx>& values, double radius) {
  const std::size_t n = values.size();
  std::vector<int> label(n, -1);
  std::vector<std::vector<Index>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    const int id = static_cast<int>(groups.size());
    groups.emplace_back();
    std::vector<std::size_t> stack{i};
    label[i] = id;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      groups.back().push_back(static_cast<Index>(cur));
      for (std::size_t j = 0; j < n; ++j)
        if (label[j] < 0 && std::abs(values[j] - values[cur]) <= radius) {
          label[j] = id;
          stack.push_back(j);
        }
    }
    std::sort(groups.back().begin(), groups.back().end());
  }
  return groups;
}

inline double offdiag_norm(const CMatrix& m) {
  return std::sqrt(std::max(0.0, m.squaredNorm() - m.diagonal().squaredNorm()));
}

}  // namespace commute_detail

/// Iterated deflation: diagonalize the first matrix, then refine each joint
/// eigenspace found so far by diagonalizing the compression of the next one.
inline JointEigenbasis joint_eigenbasis(std::span<const CMatrix> mats, const Tolerances& tol = {}) {
  using namespace commute_detail;
  if (mats.empty()) throw Error(ErrorCode::InvalidArgument, "no matrices");
  const Index n = mats.front().rows();
  for (const auto& m : mats) {
    require_same_dim(mats.front(), m, "joint_eigenbasis");
    if (!is_normal(m, tol)) throw Error(ErrorCode::NotNormal, "joint_eigenbasis: input is not normal");
  }

  CMatrix u = CMatrix::Identity(n, n);
  std::vector<std::vector<Index>> groups{{}};
  for (Index i = 0; i < n; ++i) groups.front().push_back(i);

  for (const auto& m : mats) {
    const double radius = kDeflationCluster * frobenius(m);
    std::vector<std::vector<Index>> refined;
    for (const auto& g : groups) {
      const auto k = static_cast<Index>(g.size());
      CMatrix block(n, k);
      for (Index j = 0; j < k; ++j) block.col(j) = u.col(g[static_cast<std::size_t>(j)]);
      if (k == 1) {
        refined.push_back(g);
        continue;
      }
      const CMatrix compressed = block.adjoint() * m * block;
      if (!is_normal(compressed, tol)) {
        throw Error(ErrorCode::NotNormal, "compression onto a joint eigenspace is not normal");
      }
      const auto decomp = eig_normal(compressed, tol);
      const CMatrix rotated = block * decomp.unitary;
      for (Index j = 0; j < k; ++j) u.col(g[static_cast<std::size_t>(j)]) = rotated.col(j);
      for (const auto& sub : cluster(decomp.values, radius)) {
        std::vector<Index> cols;
        for (Index s : sub) cols.push_back(g[static_cast<std::size_t>(s)]);
        refined.push_back(std::move(cols));
      }
    }
    groups = std::move(refined);
  }

  // Columns in group order.
  JointEigenbasis out;
  out.unitary.resize(n, n);
  Index col = 0;
  for (const auto& g : groups)
    for (Index j : g) out.unitary.col(col++) = u.col(j);
  for (const auto& m : mats) {
    const CMatrix t = out.unitary.adjoint() * m * out.unitary;
    std::vector<Cplx> d(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = t(i, i);
    out.diagonals.push_back(std::move(d));
    out.offdiag_residual = std::max(out.offdiag_residual, offdiag_norm(t));
  }
  return out;
}

inline bool commutes(const CMatrix& a, const CMatrix& b, const Tolerances& tol = {}) {
  const double scale = frobenius(a) + frobenius(b);
  return commutator_norm(a, b) <= tol.commute * scale * scale;
}

inline CommonEigenbasis common_eigenbasis(const CMatrix& a, const CMatrix& b, const Tolerances& tol = {}) {
  require_same_dim(a, b, "common_eigenbasis");
  if (!is_normal(a, tol) || !is_normal(b, tol)) throw Error(ErrorCode::NotNormal, "common_eigenbasis");
  if (!commutes(a, b, tol)) {
    throw Error(ErrorCode::NotCommuting, "commutator norm " + format_real(commutator_norm(a, b)));
  }
  const CMatrix pair[2] = {a, b};
  auto joint = joint_eigenbasis(pair, tol);
  return {std::move(joint.unitary), std::move(joint.diagonals[0]), std::move(joint.diagonals[1]),
          joint.offdiag_residual};
}

struct EquivalenceOptions {
  std::uint64_t seed = 0;
  Tolerances tol{};
  int degree_budget = kDefaultDegreeBudget;
};

enum class Outcome { Decided, Indeterminate };

struct EquivalenceReport {
  Outcome status = Outcome::Decided;
  std::string reason;  // set when Indeterminate
  bool commute = false;
  double commutator_norm = 0.0;
  std::optional<LineVerdict> verdict;
  bool consistent = false;
  /// Distance between the recovered arrangement and the common eigenpairs;
  /// NaN unless the pair commutes and σ_p was found to be lines.
  double arrangement_distance = std::numeric_limits<double>::quiet_NaN();
};

namespace commute_detail {

// Lines {(a_i, b_i)} from a joint eigenbasis, skipping numerically zero pairs.
inline LineArrangement eigenpair_arrangement(const std::vector<Cplx>& da, const std::vector<Cplx>& db,
                                             double zero, double tol_line) {
  std::vector<Line> lines;
  for (std::size_t i = 0; i < da.size(); ++i)
    if (std::abs(da[i]) + std::abs(db[i]) > zero) lines.push_back({da[i], db[i]});
  return linegeom_detail::merge_lines(lines, tol_line);
}

inline LineArrangement drop_tiny(const LineArrangement& arr, double zero) {
  LineArrangement out;
  for (const auto& e : arr.lines)
    if (std::abs(e.line.lambda) + std::abs(e.line.mu) > zero) out.lines.push_back(e);
  return out;
}

}  // namespace commute_detail

/// Runs both sides of the equivalence for a normal pair: direct commutativity
/// and the line structure of det(I + zA + wB) = 0.
inline EquivalenceReport equivalence_check(const CMatrix& a, const CMatrix& b, const EquivalenceOptions& opt = {}) {
  require_same_dim(a, b, "equivalence_check");
  if (!is_normal(a, opt.tol)) throw Error(ErrorCode::NotNormal, "first operator is not normal");
  if (!is_normal(b, opt.tol)) throw Error(ErrorCode::NotNormal, "second operator is not normal");

  EquivalenceReport rep;
  rep.commutator_norm = commutator_norm(a, b);
  rep.commute = commutes(a, b, opt.tol);

  try {
    DetPolyOptions dopt;
    dopt.degree_budget = opt.degree_budget;
    const BivarPoly p = char_poly_pair(a, b, dopt);
    FactorOptions fopt;
    fopt.seed = opt.seed;
    fopt.tol = opt.tol;
    rep.verdict = factor_lines(p, fopt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InterpolationFailure && e.code() != ErrorCode::NumericalAmbiguity) throw;
    rep.status = Outcome::Indeterminate;
    rep.reason = e.what();
    return rep;
  }

  rep.consistent = rep.commute == rep.verdict->is_lines();
  if (rep.commute && rep.verdict->is_lines()) {
    const auto basis = common_eigenbasis(a, b, opt.tol);
    const double zero = 1e-10 * (frobenius(a) + frobenius(b));
    const auto eig_arr = commute_detail::eigenpair_arrangement(basis.diag_a, basis.diag_b, zero, opt.tol.line);
    rep.arrangement_distance =
        compare_arrangements(commute_detail::drop_tiny(rep.verdict->arrangement(), zero), eig_arr);
    rep.consistent = rep.consistent && rep.arrangement_distance <= opt.tol.line;
  }
  return rep;
}

/// Compresses A and B onto span(W) (orthonormal columns, invariant under both)
/// and runs the equivalence check there.
inline EquivalenceReport restriction_check(const CMatrix& a, const CMatrix& b, const CMatrix& basis_w,
                                           const EquivalenceOptions& opt = {}) {
  require_same_dim(a, b, "restriction_check");
  if (basis_w.cols() == 0) throw Error(ErrorCode::InvalidArgument, "restriction to the zero subspace");
  if (basis_w.rows() != a.rows()) throw Error(ErrorCode::DimMismatch, "basis vectors have the wrong length");
  const Index k = basis_w.cols();
  if ((basis_w.adjoint() * basis_w - CMatrix::Identity(k, k)).norm() > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "basis is not orthonormal");
  }
  const CMatrix proj = basis_w * basis_w.adjoint();
  const CMatrix comp = CMatrix::Identity(a.rows(), a.rows()) - proj;
  for (const CMatrix* m : {&a, &b}) {
    const double leak = (comp * (*m) * basis_w).norm();
    if (leak > 1e-8 * std::max(1.0, frobenius(*m))) {
      throw Error(ErrorCode::NotInvariant, "subspace leaks " + format_real(leak));
    }
  }
  return equivalence_check(basis_w.adjoint() * a * basis_w, basis_w.adjoint() * b * basis_w, opt);
}

/// {1 + Σ_i c_i z_i = 0} with multiplicity.
struct Hyperplane {
  std::vector<Cplx> coeffs;
  int multiplicity = 1;
};

struct PairReport {
  std::size_t i = 0;
  std::size_t j = 0;
  EquivalenceReport report;
};

struct TupleReport {
  std::vector<PairReport> pairs;
  bool commutative = true;
  bool consistent = true;
  bool indeterminate = false;
  std::vector<Hyperplane> hyperplanes;  // filled when commutative
};

/// Pairwise equivalence checks over an n-tuple; for a commuting tuple, one
/// joint eigenbasis yields the hyperplane arrangement of σ_p.
inline TupleReport tuple_test(const OperatorTuple& t, const EquivalenceOptions& opt = {}) {
  for (const auto& m : t.mats())
    if (!is_normal(m, opt.tol)) throw Error(ErrorCode::NotNormal, "tuple member is not normal");
  TupleReport rep;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      auto r = equivalence_check(t[i], t[j], opt);
      rep.commutative = rep.commutative && r.commute;
      rep.consistent = rep.consistent && r.consistent;
      rep.indeterminate = rep.indeterminate || r.status == Outcome::Indeterminate;
      rep.pairs.push_back({i, j, std::move(r)});
    }
  if (!rep.commutative) return rep;

  const auto joint = joint_eigenbasis(t.mats(), opt.tol);
  double scale = 0.0;
  for (const auto& m : t.mats()) scale += frobenius(m);
  const double zero = 1e-10 * scale;
  for (Index k = 0; k < t.dim(); ++k) {
    std::vector<Cplx> c;
    double size = 0.0;
    for (const auto& d : joint.diagonals) {
      c.push_back(d[static_cast<std::size_t>(k)]);
      size += std::abs(c.back());
    }
    if (size <= zero) continue;
    bool merged = false;
    for (auto& h : rep.hyperplanes) {
      double diff = 0.0, mag = 1.0;
      for (std::size_t m = 0; m < c.size(); ++m) {
        diff += std::abs(h.coeffs[m] - c[m]);
        mag += std::abs(h.coeffs[m]);
      }
      if (diff <= opt.tol.line * mag) {
        ++h.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) rep.hyperplanes.push_back({std::move(c), 1});
  }
  return rep;
}

inline std::string emit_equivalence_report(const EquivalenceReport& r) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  std::string out;
  out += std::string("status=") + (r.status == Outcome::Decided ? "decided" : "indeterminate") + "\n";
  if (r.status == Outcome::Indeterminate) out += "reason=" + r.reason + "\n";
  out += std::string("commute=") + flag(r.commute) + "\n";
  out += "commutator_norm=" + format_real(r.commutator_norm) + "\n";
  if (!r.verdict) {
    out += "verdict=indeterminate\n";
    out += std::string("consistent=") + flag(r.consistent) + "\n";
    return out;
  }
  out += std::string("verdict=") + (r.verdict->is_lines() ? "lines" : "notlines") + "\n";
  out += std::string("consistent=") + flag(r.consistent) + "\n";
  out += "degree_deficit=" + std::to_string(r.verdict->degree_deficit) + "\n";
  if (r.verdict->is_lines()) {
    if (!std::isnan(r.arrangement_distance)) out += "arrangement_distance=" + format_real(r.arrangement_distance) + "\n";
    out += "lines=\n" + emit_arrangement(r.verdict->arrangement());
  } else {
    const auto& w = r.verdict->witness();
    out += "witness=" + format_complex(w.z) + " " + format_complex(w.w) + "\n";
    out += "witness_residual=" + format_real(w.residual) + "\n";
    out += "witness_line_distance=" + format_real(w.line_distance) + "\n";
  }
  return out;
}

inline std::string emit_tuple_report(const TupleReport& r, std::size_t size) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  std::string out = "tuple_size=" + std::to_string(size) + "\n";
  out += std::string("commutative=") + flag(r.commutative) + "\n";
  out += std::string("consistent=") + flag(r.consistent) + "\n";
  out += std::string("indeterminate=") + flag(r.indeterminate) + "\n";
  for (const auto& p : r.pairs) {
    const auto& e = p.report;
    out += "pair=" + std::to_string(p.i) + "," + std::to_string(p.j) + " commute=" + flag(e.commute) +
           " verdict=" + (e.verdict ? (e.verdict->is_lines() ? "lines" : "notlines") : "indeterminate") +
           " consistent=" + flag(e.consistent) + " commutator_norm=" + format_real(e.commutator_norm) + "\n";
  }
  if (r.commutative) {
    out += "hyperplanes " + std::to_string(r.hyperplanes.size()) + "\n";
    for (const auto& h : r.hyperplanes) {
      for (const auto& c : h.coeffs) out += format_real(c.real()) + " " + format_real(c.imag()) + " ";
      out += std::to_string(h.multiplicity) + "\n";
    }
  }
  return out;
}

}  // namespace projspec
