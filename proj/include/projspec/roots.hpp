#pragma once

#include <Eigen/Eigenvalues>

#include <vector>

#include "projspec/core.hpp"

namespace projspec {

/// Horner evaluation of Σ c_k t^k (coefficients in ascending order).
inline Cplx horner(std::span<const Cplx> coeffs, Cplx t) {
  Cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

/// Roots of Σ c_k t^k, ascending coefficients, as eigenvalues of the companion
/// matrix of the monic normalization. Leading coefficients with
/// |c| ≤ trim·max|c| are dropped first; trailing zero constants give roots at 0.
/// Each root gets a few short Newton steps against the original coefficients.
inline std::vector<Cplx> poly_roots(std::span<const Cplx> coeffs, double trim = 0.0) {
  double cmax = 0.0;
  for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) return {};
  std::size_t hi = coeffs.size();
  while (hi > 0 && std::abs(coeffs[hi - 1]) <= trim * cmax) --hi;
  while (hi > 0 && coeffs[hi - 1] == Cplx(0.0)) --hi;
  std::size_t lo = 0;
  while (lo < hi && coeffs[lo] == Cplx(0.0)) ++lo;

  std::vector<Cplx> roots(lo, Cplx(0.0));
  if (hi == 0 || hi - lo <= 1) return roots;
  const auto poly = coeffs.subspan(lo, hi - lo);
  const auto degree = static_cast<Index>(poly.size() - 1);
  const Cplx lead = poly.back();

  CMatrix companion = CMatrix::Zero(degree, degree);
  for (Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (Index i = 0; i < degree; ++i) companion(i, degree - 1) = -poly[static_cast<std::size_t>(i)] / lead;

  Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "companion eigenvalue iteration failed");
  }

  std::vector<Cplx> deriv(poly.size() - 1);
  for (std::size_t k = 1; k < poly.size(); ++k) deriv[k - 1] = poly[k] * static_cast<double>(k);
  for (Index i = 0; i < degree; ++i) {
    Cplx r = solver.eigenvalues()(i);
    double fr = std::abs(horner(poly, r));
    for (int step = 0; step < 3 && fr > 0.0; ++step) {
      const Cplx d = horner(deriv, r);
      if (d == Cplx(0.0)) break;
      const Cplx cand = r - horner(poly, r) / d;
      // Small steps only: a long Newton jump can land on a neighbouring root.
      if (std::abs(cand - r) > 1e-6 * (1.0 + std::abs(r))) break;
      const double fc = std::abs(horner(poly, cand));
      if (!(fc < fr)) break;
      r = cand;
      fr = fc;
    }
    roots.push_back(r);
  }
  return roots;
}

}  // namespace projspec
