#pragma once

#include <Eigen/LU>

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "projspec/core.hpp"
#include "projspec/matrix_io.hpp"

namespace projspec {

/// Coefficients of a bivariate polynomial Σ c_jk z^j w^k of total degree ≤ n.
class BivarPoly {
 public:
  explicit BivarPoly(int n = 0) : n_(n), coeffs_(CMatrix::Zero(n + 1, n + 1)) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "degree bound must be non-negative");
  }

  int degree_bound() const { return n_; }

  Cplx operator()(int j, int k) const {
    if (j < 0 || k < 0 || j > n_ || k > n_) return 0.0;
    return coeffs_(j, k);
  }

  void set(int j, int k, Cplx value) {
    if (j < 0 || k < 0 || j + k > n_) {
      throw Error(ErrorCode::InvalidArgument, "coefficient (" + std::to_string(j) + "," +
                                                  std::to_string(k) + ") exceeds degree bound " +
                                                  std::to_string(n_));
    }
    coeffs_(j, k) = value;
  }

  /// Largest j + k with a nonzero coefficient (0 for constants).
  int total_degree() const {
    int d = 0;
    for (int j = 0; j <= n_; ++j)
      for (int k = 0; j + k <= n_; ++k)
        if (coeffs_(j, k) != Cplx(0.0)) d = std::max(d, j + k);
    return d;
  }

  /// Frobenius norm of the coefficient array.
  double coeff_norm() const { return coeffs_.norm(); }
  double max_abs_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }

  BivarPoly conjugate() const {
    BivarPoly out(n_);
    out.coeffs_ = coeffs_.conjugate();
    return out;
  }

  const CMatrix& coeffs() const { return coeffs_; }

 private:
  int n_;
  CMatrix coeffs_;
};

/// Zero out coefficients below this fraction of the largest one.
inline constexpr double kCoeffDust = 1e-12;
inline constexpr int kDefaultDegreeBudget = 64;

inline Cplx eval(const BivarPoly& p, Cplx z, Cplx w) {
  const int n = p.degree_bound();
  Cplx acc = 0.0;
  for (int j = n; j >= 0; --j) {
    Cplx row = 0.0;
    for (int k = n - j; k >= 0; --k) row = row * w + p(j, k);
    acc = acc * z + row;
  }
  return acc;
}

enum class SliceMode { FixZ, FixW, Ray };

/// Coefficients (ascending) of t ↦ p(value, t) for FixZ, p(t, value) for FixW,
/// and p(t, value·t) for Ray. Trailing zeros are trimmed; at least one
/// coefficient is always returned.
inline std::vector<Cplx> univariate_slice(const BivarPoly& p, SliceMode mode, Cplx value) {
  const int n = p.degree_bound();
  std::vector<Cplx> out(static_cast<std::size_t>(n + 1), Cplx(0.0));
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; j + k <= n; ++k) {
      const Cplx c = p(j, k);
      if (c == Cplx(0.0)) continue;
      switch (mode) {
        case SliceMode::FixZ: out[static_cast<std::size_t>(k)] += c * std::pow(value, j); break;
        case SliceMode::FixW: out[static_cast<std::size_t>(j)] += c * std::pow(value, k); break;
        case SliceMode::Ray: out[static_cast<std::size_t>(j + k)] += c * std::pow(value, k); break;
      }
    }
  }
  while (out.size() > 1 && out.back() == Cplx(0.0)) out.pop_back();
  return out;
}

inline Cplx det_pencil(const CMatrix& a, const CMatrix& b, Cplx z, Cplx w) {
  const Index n = a.rows();
  CMatrix m = CMatrix::Identity(n, n) + z * a + w * b;
  return Eigen::PartialPivLU<CMatrix>(m).determinant();
}

struct DetPolyOptions {
  int degree_budget = kDefaultDegreeBudget;
  int probes = 100;
};

/// p(z, w) = det(I + zA + wB) by evaluation on a scaled torus of roots of
/// unity followed by a two-pass inverse DFT. The result is self-checked
/// against direct determinants at probe points on the unit bicircle.
inline BivarPoly char_poly_pair(const CMatrix& a, const CMatrix& b, const DetPolyOptions& opt = {}) {
  require_same_dim(a, b, "char_poly_pair");
  const int n = static_cast<int>(a.rows());
  if (n > opt.degree_budget) {
    throw Error(ErrorCode::InvalidArgument, "dimension " + std::to_string(n) +
                                                " exceeds degree budget " +
                                                std::to_string(opt.degree_budget));
  }
  const int grid = n + 1;
  const double norm_a = frobenius(a), norm_b = frobenius(b);
  // Radius ≈ 1/RMS eigenvalue modulus keeps |λz| near one on the grid.
  const double rho_a = norm_a > 0.0 ? std::sqrt(static_cast<double>(n)) / norm_a : 1.0;
  const double rho_b = norm_b > 0.0 ? std::sqrt(static_cast<double>(n)) / norm_b : 1.0;

  std::vector<Cplx> unit(static_cast<std::size_t>(grid));
  for (int m = 0; m < grid; ++m) unit[static_cast<std::size_t>(m)] = std::polar(1.0, kTwoPi * m / grid);

  CMatrix values(grid, grid);
  for (int s = 0; s < grid; ++s)
    for (int t = 0; t < grid; ++t)
      values(s, t) = det_pencil(a, b, rho_a * unit[static_cast<std::size_t>(s)],
                                rho_b * unit[static_cast<std::size_t>(t)]);

  auto inv_twiddle = [&](int m) { return std::conj(unit[static_cast<std::size_t>(m % grid)]); };
  CMatrix partial(grid, grid);
  for (int s = 0; s < grid; ++s)
    for (int k = 0; k < grid; ++k) {
      Cplx acc = 0.0;
      for (int t = 0; t < grid; ++t) acc += values(s, t) * inv_twiddle(k * t);
      partial(s, k) = acc / static_cast<double>(grid);
    }

  BivarPoly p(n);
  double cmax = 0.0;
  CMatrix raw = CMatrix::Zero(grid, grid);
  for (int j = 0; j <= n; ++j)
    for (int k = 0; j + k <= n; ++k) {
      Cplx acc = 0.0;
      for (int s = 0; s < grid; ++s) acc += partial(s, k) * inv_twiddle(j * s);
      acc /= static_cast<double>(grid);
      raw(j, k) = acc / (std::pow(rho_a, j) * std::pow(rho_b, k));
      cmax = std::max(cmax, std::abs(raw(j, k)));
    }
  for (int j = 0; j <= n; ++j)
    for (int k = 0; j + k <= n; ++k)
      if (std::abs(raw(j, k)) >= kCoeffDust * cmax) p.set(j, k, raw(j, k));
  p.set(0, 0, 1.0);

  const double bound = 1e-8 * std::pow(1.0 + norm_a + norm_b, n);
  const double golden = 0.6180339887498949, plastic = 0.7548776662466927;
  for (int i = 1; i <= opt.probes; ++i) {
    const double u = std::fmod(i * golden, 1.0), v = std::fmod(i * plastic, 1.0);
    const Cplx z = std::polar(1.0, kTwoPi * u), w = std::polar(1.0, kTwoPi * v);
    const double err = std::abs(eval(p, z, w) - det_pencil(a, b, z, w));
    if (!(err <= bound)) {
      throw Error(ErrorCode::InterpolationFailure,
                  "probe " + std::to_string(i) + " misfit " + std::to_string(err));
    }
  }
  return p;
}

/// `bipoly <n>` then one `<j> <k> <re> <im>` row per nonzero coefficient.
inline std::string emit_bipoly(const BivarPoly& p) {
  const int n = p.degree_bound();
  std::string out = "bipoly " + std::to_string(n) + "\n";
  for (int j = 0; j <= n; ++j)
    for (int k = 0; j + k <= n; ++k) {
      const Cplx c = p(j, k);
      if (c == Cplx(0.0)) continue;
      out += std::to_string(j) + " " + std::to_string(k) + " " + format_real(c.real()) + " " +
             format_real(c.imag()) + "\n";
    }
  return out;
}

inline BivarPoly parse_bipoly(std::string_view text) {
  io_detail::LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(1, 1, "missing 'bipoly' header");
  auto header = io_detail::split(line);
  if (header.size() != 2 || header[0].text != "bipoly") {
    throw ParseError(reader.line_no(), 1, "expected 'bipoly <n>'");
  }
  const auto n = io_detail::parse_count(header[1], reader.line_no());
  if (n > 4096) throw ParseError(reader.line_no(), header[1].column, "degree bound too large");
  BivarPoly p(static_cast<int>(n));
  while (reader.next(line)) {
    const auto toks = io_detail::split(line);
    if (toks.size() != 4) throw ParseError(reader.line_no(), 1, "expected '<j> <k> <re> <im>'");
    const auto j = io_detail::parse_count(toks[0], reader.line_no());
    const auto k = io_detail::parse_count(toks[1], reader.line_no());
    if (j + k > n) throw ParseError(reader.line_no(), toks[0].column, "j + k exceeds degree bound");
    double re = 0.0, im = 0.0;
    for (int f = 0; f < 2; ++f) {
      const auto& tok = toks[static_cast<std::size_t>(2 + f)];
      const char* b = tok.text.data();
      const char* e = b + tok.text.size();
      double& dst = f == 0 ? re : im;
      if (!io_detail::parse_real(b, e, dst) || b != e) {
        throw ParseError(reader.line_no(), tok.column, "malformed real '" + std::string(tok.text) + "'");
      }
    }
    p.set(static_cast<int>(j), static_cast<int>(k), Cplx(re, im));
  }
  return p;
}

}  // namespace projspec
