#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "projspec/agmon.hpp"
#include "projspec/core.hpp"
#include "projspec/matrix_io.hpp"

namespace projspec {

/// Node count placeholder: pick enough nodes for the spectrum at hand.
inline constexpr int kAutoNodes = 0;
inline constexpr int kMinAutoNodes = 64;
inline constexpr int kMaxAutoNodes = 4096;

/// Circle |u − center| = radius sampled at `nodes` equispaced points.
struct Contour {
  Cplx center;
  double radius = 1.0;
  int nodes = kAutoNodes;

  void validate() const {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "contour radius must be positive");
    if (nodes != kAutoNodes && nodes < 16) {
      throw Error(ErrorCode::InvalidArgument, "contour needs at least 16 nodes");
    }
  }

  bool encloses(Cplx z) const { return std::abs(z - center) < radius; }

  /// Signed distance from z to the circle relative to the radius.
  double relative_gap(Cplx z) const { return std::abs(std::abs(z - center) - radius) / radius; }
};

/// Eigenvalues closer than this fraction of the radius to the circle are refused.
inline constexpr double kContourMargin = 0.05;
/// LU reciprocal condition below which a resolvent node is treated as singular.
inline constexpr double kSingularRcond = 1e-14;

struct RieszResult {
  CMatrix projection;
  double idempotency_residual = 0.0;  // ‖P² − P‖_F
  double commutation_residual = 0.0;  // ‖AP − PA‖_F
  Cplx trace;
  int rank_estimate = 0;              // round(Re trace P)
  int nodes = 0;                      // quadrature nodes used
};

namespace riesz_detail {

inline std::vector<Cplx> spectrum_estimate(const CMatrix& a, const Tolerances& tol) {
  if (is_normal(a, tol)) return eig_normal(a, tol).values;
  Eigen::ComplexEigenSolver<CMatrix> solver(a, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigenvalue estimate failed");
  std::vector<Cplx> out(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

// The trapezoid error for a pole at distance ratio q = |λ − c|/r (or its
// inverse) decays like N·q^N; N is the smallest multiple of 16 taking that
// below 1e-16.
inline int nodes_for_ratio(double q) {
  int n = kMinAutoNodes;
  while (n < kMaxAutoNodes && n * std::pow(q, n) > 1e-16) n += 16;
  return n;
}

/// Checks the contour margin and resolves an automatic node count.
inline Contour admit(const CMatrix& a, Contour c, const Tolerances& tol) {
  c.validate();
  double worst = 0.0;
  for (const auto& l : spectrum_estimate(a, tol)) {
    if (c.relative_gap(l) < kContourMargin) {
      throw Error(ErrorCode::EigenvalueOnContour,
                  "eigenvalue " + format_complex(l) + " lies within the contour margin");
    }
    const double d = std::abs(l - c.center) / c.radius;
    worst = std::max(worst, std::min(d, 1.0 / d));
  }
  if (c.nodes == kAutoNodes) c.nodes = nodes_for_ratio(worst);
  return c;
}

/// Quadrature weights w_k = r e^{iφ_k}/N and resolvents (u_k I − A)^{-1};
/// (1/2πi)∮ f(u) du ≈ Σ_k w_k f(u_k).
struct ResolventNodes {
  std::vector<Cplx> weights;
  std::vector<CMatrix> resolvents;
};

inline ResolventNodes resolvents(const CMatrix& a, const Contour& c) {
  const Index n = a.rows();
  ResolventNodes out;
  out.weights.reserve(static_cast<std::size_t>(c.nodes));
  out.resolvents.reserve(static_cast<std::size_t>(c.nodes));
  const CMatrix id = CMatrix::Identity(n, n);
  for (int k = 0; k < c.nodes; ++k) {
    const Cplx e = std::polar(1.0, kTwoPi * k / c.nodes);
    const Cplx u = c.center + c.radius * e;
    Eigen::PartialPivLU<CMatrix> lu(u * id - a);
    if (!(lu.rcond() > kSingularRcond)) {
      throw Error(ErrorCode::SingularResolvent, "resolvent singular at node " + std::to_string(k));
    }
    out.weights.push_back(c.radius * e / static_cast<double>(c.nodes));
    out.resolvents.push_back(lu.solve(id));
  }
  return out;
}

inline RieszResult finish(const CMatrix& a, CMatrix p, int nodes) {
  RieszResult r;
  r.nodes = nodes;
  r.idempotency_residual = (p * p - p).norm();
  r.commutation_residual = (a * p - p * a).norm();
  r.trace = p.trace();
  r.rank_estimate = static_cast<int>(std::lround(r.trace.real()));
  r.projection = std::move(p);
  return r;
}

}  // namespace riesz_detail

/// P = (1/2πi)∮ (uI − A)^{-1} du by the trapezoid rule on the circle.
inline RieszResult riesz_projection(const CMatrix& a, const Contour& c, const Tolerances& tol = {}) {
  require_square(a, "riesz_projection");
  const Contour used = riesz_detail::admit(a, c, tol);
  const auto nodes = riesz_detail::resolvents(a, used);
  CMatrix p = CMatrix::Zero(a.rows(), a.cols());
  for (std::size_t k = 0; k < nodes.weights.size(); ++k) p += nodes.weights[k] * nodes.resolvents[k];
  return riesz_detail::finish(a, std::move(p), used.nodes);
}

/// Projection and first-order term (1/2πi)∮ (uI − A)^{-1} B (uI − A)^{-1} du
/// from one set of resolvent solves.
struct RieszExpansion {
  RieszResult zeroth;
  CMatrix first;
};

inline RieszExpansion riesz_expansion(const CMatrix& a, const CMatrix& b, const Contour& c,
                                      const Tolerances& tol = {}) {
  require_same_dim(a, b, "riesz_expansion");
  const Contour used = riesz_detail::admit(a, c, tol);
  const auto nodes = riesz_detail::resolvents(a, used);
  CMatrix p = CMatrix::Zero(a.rows(), a.cols());
  CMatrix first = CMatrix::Zero(a.rows(), a.cols());
  for (std::size_t k = 0; k < nodes.weights.size(); ++k) {
    const auto& r = nodes.resolvents[k];
    p += nodes.weights[k] * r;
    first += nodes.weights[k] * (r * b * r);
  }
  return {riesz_detail::finish(a, std::move(p), used.nodes), std::move(first)};
}

inline CMatrix first_order_term(const CMatrix& a, const CMatrix& b, const Contour& c, const Tolerances& tol = {}) {
  return riesz_expansion(a, b, c, tol).first;
}

struct SlopeReport {
  std::vector<double> epsilons;
  std::vector<double> residuals;
  double slope = 0.0;
  bool exact = false;  // every residual at rounding level
  bool certified() const { return exact || slope >= 1.8; }
};

namespace riesz_detail {

inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return 0.0;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

inline void require_isolated(const CMatrix& a, Cplx lambda, const Contour& c, const Tolerances& tol) {
  c.validate();
  if (!c.encloses(lambda)) throw Error(ErrorCode::InvalidArgument, "contour does not enclose lambda");
  bool found = false;
  const double scale = std::max(1.0, frobenius(a));
  for (const auto& l : spectrum_estimate(a, tol)) {
    if (!c.encloses(l)) continue;
    if (std::abs(l - lambda) > 1e-8 * scale) {
      throw Error(ErrorCode::InvalidArgument, "contour encloses eigenvalue " + format_complex(l) +
                                                  " other than lambda");
    }
    found = true;
  }
  if (!found) throw Error(ErrorCode::InvalidArgument, "lambda is not an eigenvalue inside the contour");
}

}  // namespace riesz_detail

/// Residual r(ε) = ‖P₀(A_ε − λ_ε I)P_ε − εP₀(B − μI)P₀‖_F with A_ε = A + εB and
/// λ_ε = λ + εμ, together with the least-squares slope of log r against log ε.
inline SlopeReport perturbation_check(const CMatrix& a, const CMatrix& b, Cplx lambda, Cplx mu, const Contour& c,
                                      const std::vector<double>& eps_list, const Tolerances& tol = {}) {
  require_same_dim(a, b, "perturbation_check");
  riesz_detail::require_isolated(a, lambda, c, tol);
  const Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix p0 = riesz_projection(a, c, tol).projection;
  const CMatrix first = eps_list.empty() ? CMatrix() : CMatrix(p0 * (b - mu * id) * p0);

  SlopeReport rep;
  for (double eps : eps_list) {
    const CMatrix a_eps = a + eps * b;
    for (const auto& l : riesz_detail::spectrum_estimate(a_eps, tol)) {
      if (c.relative_gap(l) < kContourMargin) {
        throw Error(ErrorCode::ContourCapturesPerturbedSpectrumBoundary,
                    "eigenvalue of A + " + format_real(eps) + "·B reaches the contour");
      }
    }
    const CMatrix p_eps = riesz_projection(a_eps, c, tol).projection;
    const Cplx lambda_eps = lambda + eps * mu;
    const double r = (p0 * (a_eps - lambda_eps * id) * p_eps - eps * first).norm();
    rep.epsilons.push_back(eps);
    rep.residuals.push_back(r);
  }
  const double floor = 1e-12 * (1.0 + frobenius(a) + frobenius(b));
  rep.exact = std::all_of(rep.residuals.begin(), rep.residuals.end(), [&](double r) { return r <= floor; });
  rep.slope = riesz_detail::log_log_slope(rep.epsilons, rep.residuals);
  return rep;
}

/// Continuity of P_ε → P₀: C = max ‖P_ε − P₀‖_F/ε, and the slope of
/// ‖P_ε − P₀ − εP̃‖_F against ε.
struct ContinuityReport {
  double lipschitz = 0.0;
  SlopeReport second_order;
};

inline ContinuityReport projection_continuity(const CMatrix& a, const CMatrix& b, const Contour& c,
                                              const std::vector<double>& eps_list, const Tolerances& tol = {}) {
  const auto base = riesz_expansion(a, b, c, tol);
  ContinuityReport out;
  for (double eps : eps_list) {
    const CMatrix p_eps = riesz_projection(a + eps * b, c, tol).projection;
    out.lipschitz = std::max(out.lipschitz, (p_eps - base.zeroth.projection).norm() / eps);
    out.second_order.epsilons.push_back(eps);
    out.second_order.residuals.push_back((p_eps - base.zeroth.projection - eps * base.first).norm());
  }
  const double floor = 1e-12 * (1.0 + frobenius(a) + frobenius(b));
  const auto& res = out.second_order.residuals;
  out.second_order.exact = std::all_of(res.begin(), res.end(), [&](double r) { return r <= floor; });
  out.second_order.slope = riesz_detail::log_log_slope(out.second_order.epsilons, res);
  return out;
}

struct Lemma34Result {
  CVector vector;                 // unit, largest-modulus entry real positive
  double residual_a = 0.0;        // ‖Av‖
  double residual_b = 0.0;        // ‖Bv − μv‖
  std::vector<Cplx> zs;
  std::vector<double> history;    // ‖Av_n‖ + ‖Bv_n − μv_n‖ along zs
};

namespace riesz_detail {

inline void fix_phase(CVector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  const Cplx pivot = v(best);
  if (std::abs(pivot) > 0.0) v *= std::abs(pivot) / pivot;
}

inline std::pair<double, CVector> smallest_singular(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const Index last = m.cols() - 1;
  return {svd.singularValues()(last), svd.matrixV().col(last)};
}

}  // namespace riesz_detail

/// Default escape sequence: z_n = e^{iθ}·10^n, n = 1..6, with θ the sector
/// witness rotation of A's spectrum.
inline std::vector<Cplx> default_lemma34_sequence(const CMatrix& a, const Tolerances& tol = {}) {
  const auto decomp = eig_normal(a, tol);
  const auto wit = strong_agmon_check(decomp.values);
  const double theta = wit ? wit->rotation() : 0.0;
  std::vector<Cplx> zs;
  for (int n = 1; n <= 6; ++n) zs.push_back(std::polar(std::pow(10.0, n), theta));
  return zs;
}

/// Follows v_n ∈ ker(I + z_n A − B/μ) (smallest right singular vector) along
/// z_n → ∞; the limit is a unit vector with Av = 0 and Bv = μv.
inline Lemma34Result lemma34_solver(const CMatrix& a, const CMatrix& b, Cplx mu, std::vector<Cplx> zs = {},
                                    const Tolerances& tol = {}) {
  require_same_dim(a, b, "lemma34_solver");
  if (mu == Cplx(0.0)) throw Error(ErrorCode::InvalidArgument, "mu must be nonzero");
  const double bnorm = operator_norm(b, tol);
  if (std::abs(std::abs(mu) - bnorm) > 1e-8 * std::max(1.0, bnorm)) {
    throw Error(ErrorCode::InvalidArgument, "|mu| = " + format_real(std::abs(mu)) +
                                                " differs from the operator norm " + format_real(bnorm));
  }
  const Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const double na = frobenius(a), nb = frobenius(b);
  const Cplx probes[5] = {0.0, 1.0, Cplx(0, 1), -2.0, Cplx(0.5, -1.5)};
  for (const auto& z : probes) {
    const double sigma = riesz_detail::smallest_singular(id + z * a - b / mu).first;
    if (sigma > 1e-8 * (1.0 + std::abs(z) * na + nb / std::abs(mu))) {
      throw Error(ErrorCode::LineNotInSpectrum, "I + zA − B/mu is invertible at z = " + format_complex(z));
    }
  }
  if (zs.empty()) zs = default_lemma34_sequence(a, tol);

  Lemma34Result out;
  out.zs = zs;
  for (const auto& z : zs) {
    CVector v = riesz_detail::smallest_singular(id + z * a - b / mu).second;
    riesz_detail::fix_phase(v);
    out.residual_a = (a * v).norm();
    out.residual_b = (b * v - mu * v).norm();
    out.history.push_back(out.residual_a + out.residual_b);
    out.vector = std::move(v);
  }
  if (!(out.residual_a <= 1e-6 && out.residual_b <= 1e-6)) {
    throw Error(ErrorCode::NonConvergence, "final residuals " + format_real(out.residual_a) + ", " +
                                               format_real(out.residual_b) + " exceed 1e-6");
  }
  return out;
}

inline std::string emit_slope_csv(const SlopeReport& rep) {
  std::string out = "epsilon,residual\n";
  for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
    out += format_real(rep.epsilons[i]) + "," + format_real(rep.residuals[i]) + "\n";
  return out;
}

}  // namespace projspec
