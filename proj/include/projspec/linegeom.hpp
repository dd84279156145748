#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "projspec/detpoly.hpp"
#include "projspec/roots.hpp"

namespace projspec {

/// The complex line {(z, w) : 1 + λz + μw = 0}.
struct Line {
  Cplx lambda;
  Cplx mu;

  Cplx at(Cplx z, Cplx w) const { return 1.0 + lambda * z + mu * w; }

  /// Euclidean distance in ℂ² from (z, w) to the line.
  double distance(Cplx z, Cplx w) const {
    return std::abs(at(z, w)) / std::sqrt(std::norm(lambda) + std::norm(mu));
  }
};

struct LineEntry {
  Line line;
  int multiplicity = 1;
};

struct LineArrangement {
  std::vector<LineEntry> lines;

  int total_multiplicity() const {
    int m = 0;
    for (const auto& e : lines) m += e.multiplicity;
    return m;
  }

  std::vector<Line> expanded() const {
    std::vector<Line> out;
    for (const auto& e : lines)
      for (int i = 0; i < e.multiplicity; ++i) out.push_back(e.line);
    return out;
  }
};

/// A point of the zero set that lies on none of the candidate lines.
struct NotLinesWitness {
  Cplx z;
  Cplx w;
  double residual = 0.0;      // |p(z, w)|
  double line_distance = 0.0; // distance to the nearest candidate line
};

struct LineVerdict {
  std::variant<LineArrangement, NotLinesWitness> kind;
  int degree_deficit = 0;  // degree bound minus total degree (lines at infinity)
  double recon_error = 0.0;  // relative re-expansion error of the best candidate

  bool is_lines() const { return std::holds_alternative<LineArrangement>(kind); }
  const LineArrangement& arrangement() const { return std::get<LineArrangement>(kind); }
  const NotLinesWitness& witness() const { return std::get<NotLinesWitness>(kind); }
};

/// Minimum-cost assignment (Hungarian method, O(n³)). Returns, for each row,
/// the assigned column.
inline std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

/// Largest pair distance under the optimal assignment of the two expanded
/// multisets; +∞ when their cardinalities differ.
inline double compare_arrangements(const LineArrangement& a, const LineArrangement& b) {
  const auto la = a.expanded(), lb = b.expanded();
  if (la.size() != lb.size()) return std::numeric_limits<double>::infinity();
  if (la.empty()) return 0.0;
  std::vector<std::vector<double>> cost(la.size(), std::vector<double>(lb.size()));
  for (std::size_t i = 0; i < la.size(); ++i)
    for (std::size_t j = 0; j < lb.size(); ++j)
      cost[i][j] = std::sqrt(std::norm(la[i].lambda - lb[j].lambda) + std::norm(la[i].mu - lb[j].mu));
  const auto match = min_cost_assignment(cost);
  double worst = 0.0;
  for (std::size_t i = 0; i < la.size(); ++i) worst = std::max(worst, cost[i][match[i]]);
  return worst;
}

inline std::vector<Line> line_through_point(const LineArrangement& arr, Cplx z, Cplx w,
                                            const Tolerances& tol = {}) {
  std::vector<Line> out;
  const double bound = tol.line * (1.0 + std::abs(z) + std::abs(w));
  for (const auto& e : arr.lines)
    if (std::abs(e.line.at(z, w)) <= bound) out.push_back(e.line);
  return out;
}

/// Π (1 + λ_i z + μ_i w)^{m_i} as a polynomial with the given degree bound.
inline BivarPoly expand_lines(const LineArrangement& arr, int degree_bound) {
  const int total = arr.total_multiplicity();
  if (total > degree_bound) {
    throw Error(ErrorCode::InvalidArgument, "arrangement degree exceeds bound");
  }
  CMatrix c = CMatrix::Zero(degree_bound + 1, degree_bound + 1);
  c(0, 0) = 1.0;
  int deg = 0;
  for (const auto& line : arr.expanded()) {
    ++deg;
    for (int j = deg; j >= 0; --j)
      for (int k = deg - j; k >= 0; --k) {
        Cplx acc = c(j, k);
        if (j > 0) acc += line.lambda * c(j - 1, k);
        if (k > 0) acc += line.mu * c(j, k - 1);
        c(j, k) = acc;
      }
  }
  BivarPoly p(degree_bound);
  for (int j = 0; j <= degree_bound; ++j)
    for (int k = 0; j + k <= degree_bound; ++k) p.set(j, k, c(j, k));
  return p;
}

/// ‖expand(arr) − p‖_F / ‖p‖_F
inline double reconstruction_error(const LineArrangement& arr, const BivarPoly& p) {
  const BivarPoly q = expand_lines(arr, p.degree_bound());
  return (q.coeffs() - p.coeffs()).norm() / p.coeff_norm();
}

struct FactorOptions {
  std::uint64_t seed = 0;
  Tolerances tol{};
};

namespace linegeom_detail {

/// Distance below which a ray value counts as explained by a candidate pair.
inline constexpr double kRayMatchTol = 1e-4;
/// Slice roots closer than these (relative) are one repeated root. Wider radii
/// are tried only when the tighter ones fail to reconstruct; a root of
/// multiplicity m splits by roughly (coefficient noise)^{1/m}.
inline constexpr double kClusterRadii[] = {1e-6, 1e-5, 1e-4, 1e-3};

// For a slice Σ c_j t^j = Π (1 + ν_i t) with c_0 = 1, recovers the multiset
// {ν_i} of size `count`: the reversed polynomial has roots −ν_i, and missing
// degree contributes ν = 0.
inline std::vector<Cplx> slice_values(const std::vector<Cplx>& coeffs, int count, double radius) {
  std::vector<Cplx> reversed(coeffs.rbegin(), coeffs.rend());
  auto roots = poly_roots(reversed);
  std::vector<Cplx> nus;
  nus.reserve(static_cast<std::size_t>(count));
  for (const auto& r : roots) nus.push_back(-r);
  while (static_cast<int>(nus.size()) < count) nus.emplace_back(0.0);
  if (static_cast<int>(nus.size()) > count) {
    throw Error(ErrorCode::InvalidArgument, "slice degree exceeds total degree");
  }
  // Average clusters of nearly repeated roots.
  std::vector<char> done(nus.size(), 0);
  for (std::size_t i = 0; i < nus.size(); ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> members{i};
    for (std::size_t j = i + 1; j < nus.size(); ++j)
      if (!done[j] && std::abs(nus[j] - nus[i]) <= radius * (1.0 + std::abs(nus[i])))
        members.push_back(j);
    if (members.size() > 1) {
      Cplx mean = 0.0;
      for (auto m : members) mean += nus[m];
      mean /= static_cast<double>(members.size());
      for (auto m : members) {
        nus[m] = mean;
        done[m] = 1;
      }
    }
  }
  return nus;
}

struct Ray {
  Cplx gamma;
  std::vector<Cplx> values;
};

inline double nearest(const std::vector<Cplx>& pool, const std::vector<char>& taken, Cplx x,
                      std::size_t& where) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pool.size(); ++k) {
    if (taken[k]) continue;
    const double d = std::abs(pool[k] - x) / (1.0 + std::abs(pool[k]));
    if (d < best) {
      best = d;
      where = k;
    }
  }
  return best;
}

struct Pairing {
  std::vector<std::size_t> mu_for_lambda;
  bool matched_ray[2] = {false, false};
};

// Greedy: repeatedly take the (λ, μ) pair whose two ray predictions sit closest
// to still-unclaimed ray values, and claim those values.
inline Pairing greedy_pairing(const std::vector<Cplx>& lambdas, const std::vector<Cplx>& mus,
                              const Ray (&rays)[2]) {
  const std::size_t d = lambdas.size();
  Pairing out;
  out.mu_for_lambda.assign(d, 0);
  std::vector<char> lam_used(d, 0), mu_used(d, 0);
  std::vector<char> taken[2] = {std::vector<char>(d, 0), std::vector<char>(d, 0)};
  double worst[2] = {0.0, 0.0};
  for (std::size_t step = 0; step < d; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0, bk[2] = {0, 0};
    double bd[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < d; ++i) {
      if (lam_used[i]) continue;
      for (std::size_t j = 0; j < d; ++j) {
        if (mu_used[j]) continue;
        std::size_t k[2] = {0, 0};
        double dist[2];
        for (int r = 0; r < 2; ++r)
          dist[r] = nearest(rays[r].values, taken[r], lambdas[i] + rays[r].gamma * mus[j], k[r]);
        const double cost = dist[0] + dist[1];
        if (cost < best) {
          best = cost;
          bi = i;
          bj = j;
          for (int r = 0; r < 2; ++r) {
            bk[r] = k[r];
            bd[r] = dist[r];
          }
        }
      }
    }
    lam_used[bi] = 1;
    mu_used[bj] = 1;
    out.mu_for_lambda[bi] = bj;
    for (int r = 0; r < 2; ++r) {
      taken[r][bk[r]] = 1;
      worst[r] = std::max(worst[r], bd[r]);
    }
  }
  for (int r = 0; r < 2; ++r) out.matched_ray[r] = worst[r] <= kRayMatchTol;
  return out;
}

// Static-cost optimal assignment; used when the greedy pairing fails to
// reconstruct.
inline std::vector<std::size_t> assignment_pairing(const std::vector<Cplx>& lambdas,
                                                   const std::vector<Cplx>& mus, const Ray (&rays)[2]) {
  const std::size_t d = lambdas.size();
  std::vector<char> none(d, 0);
  std::vector<std::vector<double>> cost(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      std::size_t k = 0;
      cost[i][j] = nearest(rays[0].values, none, lambdas[i] + rays[0].gamma * mus[j], k) +
                   nearest(rays[1].values, none, lambdas[i] + rays[1].gamma * mus[j], k);
    }
  return min_cost_assignment(cost);
}

// Groups equal lines into entries with multiplicity, dropping (0, 0) pairs.
inline LineArrangement merge_lines(const std::vector<Line>& lines, double tol_line) {
  LineArrangement arr;
  for (const auto& l : lines) {
    if (l.lambda == Cplx(0.0) && l.mu == Cplx(0.0)) continue;
    bool merged = false;
    for (auto& e : arr.lines) {
      const double scale = 1.0 + std::abs(e.line.lambda) + std::abs(e.line.mu);
      if (std::abs(e.line.lambda - l.lambda) + std::abs(e.line.mu - l.mu) <= tol_line * scale) {
        ++e.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) arr.lines.push_back({l, 1});
  }
  return arr;
}

inline std::vector<Line> pair_up(const std::vector<Cplx>& lambdas, const std::vector<Cplx>& mus,
                                 const std::vector<std::size_t>& mu_for_lambda) {
  std::vector<Line> out;
  for (std::size_t i = 0; i < lambdas.size(); ++i) out.push_back({lambdas[i], mus[mu_for_lambda[i]]});
  return out;
}

// Newton refinement of t on the slice polynomial.
inline Cplx polish_root(const std::vector<Cplx>& coeffs, Cplx t) {
  std::vector<Cplx> deriv;
  for (std::size_t k = 1; k < coeffs.size(); ++k) deriv.push_back(coeffs[k] * static_cast<double>(k));
  double ft = std::abs(horner(coeffs, t));
  for (int it = 0; it < 8 && ft > 0.0; ++it) {
    const Cplx d = horner(deriv, t);
    if (d == Cplx(0.0)) break;
    const Cplx cand = t - horner(coeffs, t) / d;
    const double fc = std::abs(horner(coeffs, cand));
    if (!(fc < ft)) break;
    t = cand;
    ft = fc;
  }
  return t;
}

}  // namespace linegeom_detail

/// Decides whether the zero set of p (with p(0,0) = 1) is a union of lines
/// 1 + λz + μw = 0. λ's come from the slice w = 0, μ's from z = 0, and two
/// seeded rays w = γz pair them up. A candidate is accepted only if its
/// re-expanded product matches p.
inline LineVerdict factor_lines(const BivarPoly& p, const FactorOptions& opt = {}) {
  using namespace linegeom_detail;
  const int d = p.total_degree();
  if (std::abs(p(0, 0) - 1.0) > 1e-12) {
    throw Error(ErrorCode::DegenerateInput, "constant term is not 1");
  }
  LineVerdict verdict;
  verdict.degree_deficit = p.degree_bound() - d;
  if (d == 0) {
    verdict.kind = LineArrangement{};
    return verdict;
  }

  const auto z_slice = univariate_slice(p, SliceMode::FixW, 0.0);
  const auto w_slice = univariate_slice(p, SliceMode::FixZ, 0.0);

  std::mt19937_64 rng(opt.seed);
  Ray rays[2];
  std::vector<Cplx> ray_coeffs[2];
  for (int r = 0; r < 2; ++r) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    rays[r].gamma = std::polar(1.0, kTwoPi * u);
    ray_coeffs[r] = univariate_slice(p, SliceMode::Ray, rays[r].gamma);
  }

  std::vector<Line> candidate;
  bool matched = false;
  double err = std::numeric_limits<double>::infinity();
  for (std::size_t attempt = 0; attempt < std::size(kClusterRadii); ++attempt) {
    const double radius = kClusterRadii[attempt];
    const auto lambdas = slice_values(z_slice, d, radius);
    const auto mus = slice_values(w_slice, d, radius);
    Ray trial[2] = {rays[0], rays[1]};
    for (int r = 0; r < 2; ++r) trial[r].values = slice_values(ray_coeffs[r], d, radius);

    const auto greedy = greedy_pairing(lambdas, mus, trial);
    auto pairs = pair_up(lambdas, mus, greedy.mu_for_lambda);
    LineArrangement arr = merge_lines(pairs, opt.tol.line);
    double e = reconstruction_error(arr, p);
    if (!(e <= opt.tol.recon)) {
      auto alt = pair_up(lambdas, mus, assignment_pairing(lambdas, mus, trial));
      LineArrangement alt_arr = merge_lines(alt, opt.tol.line);
      const double alt_err = reconstruction_error(alt_arr, p);
      if (alt_err < e) {
        e = alt_err;
        arr = std::move(alt_arr);
        pairs = std::move(alt);
      }
    }
    if (e <= opt.tol.recon) {
      verdict.recon_error = e;
      verdict.kind = std::move(arr);
      return verdict;
    }
    // Diagnostics come from the tightest clustering.
    if (attempt == 0) {
      err = e;
      candidate = std::move(pairs);
      matched = greedy.matched_ray[0] || greedy.matched_ray[1];
      for (int r = 0; r < 2; ++r) rays[r].values = std::move(trial[r].values);
    }
  }
  verdict.recon_error = err;
  if (matched) {
    throw Error(ErrorCode::NumericalAmbiguity,
                "ray matching succeeded but reconstruction error is " + std::to_string(err));
  }

  // Witness: a zero on one of the rays, as far as possible from every candidate.
  NotLinesWitness best;
  best.line_distance = -1.0;
  for (int r = 0; r < 2; ++r) {
    for (const auto& nu : rays[r].values) {
      if (nu == Cplx(0.0)) continue;
      const Cplx t = polish_root(ray_coeffs[r], -1.0 / nu);
      const Cplx z = t, w = rays[r].gamma * t;
      double nearest_line = std::numeric_limits<double>::infinity();
      for (const auto& l : candidate) {
        if (l.lambda == Cplx(0.0) && l.mu == Cplx(0.0)) continue;
        nearest_line = std::min(nearest_line, l.distance(z, w));
      }
      if (nearest_line > best.line_distance) {
        best = {z, w, std::abs(eval(p, z, w)), nearest_line};
      }
    }
  }
  if (!(best.line_distance > opt.tol.line)) {
    throw Error(ErrorCode::NumericalAmbiguity, "no zero of p separated from the candidate lines");
  }
  verdict.kind = best;
  return verdict;
}

/// `lines <count>` then `<re λ> <im λ> <re μ> <im μ> <mult>` rows.
inline std::string emit_arrangement(const LineArrangement& arr) {
  std::string out = "lines " + std::to_string(arr.lines.size()) + "\n";
  for (const auto& e : arr.lines) {
    out += format_real(e.line.lambda.real()) + " " + format_real(e.line.lambda.imag()) + " " +
           format_real(e.line.mu.real()) + " " + format_real(e.line.mu.imag()) + " " +
           std::to_string(e.multiplicity) + "\n";
  }
  return out;
}

inline LineArrangement parse_arrangement(std::string_view text) {
  io_detail::LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(1, 1, "missing 'lines' header");
  const auto header = io_detail::split(line);
  if (header.size() != 2 || header[0].text != "lines") {
    throw ParseError(reader.line_no(), 1, "expected 'lines <count>'");
  }
  const auto count = io_detail::parse_count(header[1], reader.line_no());
  LineArrangement arr;
  for (std::size_t i = 0; i < count; ++i) {
    if (!reader.next(line)) throw ParseError(reader.line_no() + 1, 1, "missing arrangement row");
    const auto toks = io_detail::split(line);
    if (toks.size() != 5) throw ParseError(reader.line_no(), 1, "expected 5 fields");
    double v[4];
    for (int f = 0; f < 4; ++f) {
      const auto& tok = toks[static_cast<std::size_t>(f)];
      const char* b = tok.text.data();
      const char* e = b + tok.text.size();
      if (!io_detail::parse_real(b, e, v[f]) || b != e) {
        throw ParseError(reader.line_no(), tok.column, "malformed real");
      }
    }
    const auto mult = io_detail::parse_count(toks[4], reader.line_no());
    if (mult == 0) throw ParseError(reader.line_no(), toks[4].column, "multiplicity must be positive");
    arr.lines.push_back({{Cplx(v[0], v[1]), Cplx(v[2], v[3])}, static_cast<int>(mult)});
  }
  return arr;
}

}  // namespace projspec
