#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "projspec/core.hpp"
#include "projspec/matrix_io.hpp"

namespace projspec {

/// An open sector {θ − δ < Arg z < θ + δ} free of nonzero eigenvalues, with
/// the escape constant ε it certifies.
struct SectorWitness {
  double theta = 0.0;    // sector centre in [0, 2π)
  double delta = 0.0;    // half-width in (0, π]
  double epsilon = 0.0;  // in (0, 1)

  double max_gap() const { return 2.0 * delta; }

  /// Direction of the escape sequence z_n = e^{i·rotation}·n. Rotating the
  /// spectrum by this angle moves the free sector onto the negative axis.
  double rotation() const {
    double r = std::numbers::pi - theta;
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
  }
};

inline constexpr double kAngularResolution = 1e-12;
inline constexpr double kEpsilonCap = 1.0 - 1e-12;

namespace agmon_detail {

inline double epsilon_for(double delta) {
  return delta >= std::numbers::pi / 2 ? kEpsilonCap : std::min(std::sin(delta), kEpsilonCap);
}

inline bool is_real(Cplx z) { return std::abs(z.imag()) <= 1e-12 * std::abs(z); }

}  // namespace agmon_detail

/// Largest eigenvalue-free sector, centred on the bisector of the widest
/// circular gap between arguments of nonzero eigenvalues. Zeros are ignored.
/// Returns nullopt only when no gap exceeds the angular resolution.
inline std::optional<SectorWitness> strong_agmon_check(std::span<const Cplx> spectrum) {
  using std::numbers::pi;
  std::vector<double> args;
  bool all_real = true, has_pos = false, has_neg = false;
  for (const auto& z : spectrum) {
    if (z == Cplx(0.0)) continue;
    args.push_back(arg_2pi(z));
    if (agmon_detail::is_real(z)) {
      (z.real() > 0.0 ? has_pos : has_neg) = true;
    } else {
      all_real = false;
    }
  }

  // Self-adjoint spectra: the open upper half-plane (or more) is always free.
  if (all_real) {
    if (has_pos && has_neg) return SectorWitness{pi / 2, pi / 2, kEpsilonCap};
    if (has_neg) return SectorWitness{0.0, pi, kEpsilonCap};
    return SectorWitness{pi, pi, kEpsilonCap};
  }

  std::sort(args.begin(), args.end());
  std::vector<double> distinct;
  for (double a : args)
    if (distinct.empty() || a - distinct.back() > kAngularResolution) distinct.push_back(a);
  if (distinct.size() > 1 && distinct.front() + kTwoPi - distinct.back() <= kAngularResolution)
    distinct.pop_back();

  const std::size_t m = distinct.size();
  double best_gap = -1.0, best_bisector = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double start = distinct[i];
    const double gap = i + 1 < m ? distinct[i + 1] - start : distinct.front() + kTwoPi - start;
    double bisector = start + gap / 2;
    if (bisector >= kTwoPi) bisector -= kTwoPi;
    const bool wider = gap > best_gap + kAngularResolution;
    const bool tie = std::abs(gap - best_gap) <= kAngularResolution && bisector < best_bisector;
    if (wider || tie) {
      best_gap = std::max(gap, best_gap);
      best_bisector = bisector;
    }
  }
  if (best_gap <= kAngularResolution) return std::nullopt;
  const double delta = best_gap / 2;
  return SectorWitness{best_bisector, delta, agmon_detail::epsilon_for(delta)};
}

/// z_n = e^{iθ}·n for n = 1..count.
inline std::vector<Cplx> witness_sequence(double theta, int count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "witness count must be positive");
  std::vector<Cplx> zs;
  zs.reserve(static_cast<std::size_t>(count));
  const Cplx dir = std::polar(1.0, theta);
  for (int n = 1; n <= count; ++n) zs.push_back(dir * static_cast<double>(n));
  return zs;
}

/// The escape sequence certified by a sector witness.
inline std::vector<Cplx> witness_sequence(const SectorWitness& wit, int count) {
  return witness_sequence(wit.rotation(), count);
}

struct WitnessCheck {
  bool ok = true;
  Cplx lambda;          // minimizing pair
  Cplx z;
  double modulus = std::numeric_limits<double>::infinity();  // min |1 + λz|
};

/// ok iff |1 + λz| ≥ ε for every λ in the spectrum and every z. λ = 0 always
/// contributes |1 + 0·z| = 1.
inline WitnessCheck verify_witness(std::span<const Cplx> spectrum, std::span<const Cplx> zs, double epsilon) {
  WitnessCheck out;
  for (const auto& z : zs) {
    for (const auto& l : spectrum) {
      const double m = std::abs(1.0 + l * z);
      if (m < out.modulus) {
        out.modulus = m;
        out.lambda = l;
        out.z = z;
      }
    }
    if (!zs.empty() && spectrum.empty()) out.modulus = std::min(out.modulus, 1.0);
  }
  out.ok = out.modulus >= epsilon;
  return out;
}

struct EscapeProfile {
  double epsilon = 0.0;
  std::vector<double> angles;
  std::vector<double> radii;
  double min_radius = 0.0;
};

/// For each direction θ_k = 2πk/n_angles, the largest ray parameter t at which
/// e^{iθ_k}t still lies in some forbidden open disk D(−1/λ, ε/|λ|).
inline EscapeProfile escape_radius_profile(std::span<const Cplx> spectrum, double epsilon, int n_angles = 4096) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  if (n_angles < 8) throw Error(ErrorCode::InvalidArgument, "at least 8 directions required");

  struct Disk {
    Cplx center;
    double power;  // |c|² − r²
  };
  std::vector<Disk> disks;
  for (const auto& l : spectrum) {
    if (l == Cplx(0.0)) continue;
    const Cplx c = -1.0 / l;
    const double r = epsilon / std::abs(l);
    disks.push_back({c, std::norm(c) - r * r});
  }

  EscapeProfile out;
  out.epsilon = epsilon;
  out.angles.resize(static_cast<std::size_t>(n_angles));
  out.radii.assign(static_cast<std::size_t>(n_angles), 0.0);
  for (int k = 0; k < n_angles; ++k) {
    const double theta = kTwoPi * k / n_angles;
    const Cplx u = std::polar(1.0, theta);
    double radius = 0.0;
    // |tu − c|² = r²  ⇔  t² − 2t·Re(ū c) + |c|² − r² = 0
    for (const auto& d : disks) {
      const double b = (std::conj(u) * d.center).real();
      const double disc = b * b - d.power;
      if (disc <= 0.0) continue;
      const double t_far = b + std::sqrt(disc);
      if (t_far > radius) radius = t_far;
    }
    out.angles[static_cast<std::size_t>(k)] = theta;
    out.radii[static_cast<std::size_t>(k)] = radius;
  }
  out.min_radius = *std::min_element(out.radii.begin(), out.radii.end());
  return out;
}

inline constexpr int kMaxExampleLevel = 14;

/// ν_n = Σ_{j=1}^n 1/j
inline double harmonic(int n) {
  double s = 0.0;
  for (int j = n; j >= 1; --j) s += 1.0 / j;
  return s;
}

/// Diagonal of the operator Σ λ_{n,i} e_{n,i} ⊗ e_{n,i} truncated at `level`:
/// λ_{n,i} = 1/(ν_n ω_{n,i}) with ω_{n,i} = e^{2πi(i−1)/2^n}, in (n, i) order.
inline std::vector<Cplx> example_spectrum(int level) {
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "level must be positive");
  if (level > kMaxExampleLevel) {
    throw Error(ErrorCode::LevelTooLarge, "level " + std::to_string(level) + " exceeds " +
                                              std::to_string(kMaxExampleLevel));
  }
  std::vector<Cplx> out;
  for (int n = 1; n <= level; ++n) {
    const double nu = harmonic(n);
    const long count = 1L << n;
    for (long i = 0; i < count; ++i) {
      // 1/ω = e^{−2πi(i−1)/2^n}; quarter turns are written exactly.
      Cplx inv_omega;
      if ((i * 4) % count == 0) {
        const long quarter = (i * 4 / count) % 4;
        constexpr Cplx quarters[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
        inv_omega = quarters[quarter];
      } else {
        inv_omega = std::polar(1.0, -kTwoPi * static_cast<double>(i) / static_cast<double>(count));
      }
      out.push_back(inv_omega / nu);
    }
  }
  return out;
}

using DiagonalOperator = Eigen::DiagonalMatrix<Cplx, Eigen::Dynamic>;

inline DiagonalOperator example_operator(int level) {
  const auto spec = example_spectrum(level);
  CVector d(static_cast<Index>(spec.size()));
  for (std::size_t i = 0; i < spec.size(); ++i) d(static_cast<Index>(i)) = spec[i];
  return DiagonalOperator(d);
}

struct LadderRow {
  int level = 0;
  Index dim = 0;
  double max_gap = 0.0;
  double min_escape_radius = 0.0;
};

/// Truncation ladder of the example operator for levels 1..max_level.
inline std::vector<LadderRow> example_ladder(int max_level, double epsilon = 0.5, int n_angles = 4096) {
  std::vector<LadderRow> rows;
  for (int level = 1; level <= max_level; ++level) {
    const auto spec = example_spectrum(level);
    const auto sector = strong_agmon_check(spec);
    const auto profile = escape_radius_profile(spec, epsilon, n_angles);
    rows.push_back({level, static_cast<Index>(spec.size()), sector ? sector->max_gap() : 0.0,
                    profile.min_radius});
  }
  return rows;
}

/// Lower bound (1 − ε)·ν_m on the ladder's min escape radius at `level`, for
/// the largest m ≤ level with 2^m·arcsin(ε) ≥ π; 0 when no such m exists.
inline double ladder_radius_bound(int level, double epsilon) {
  const double half_angle = std::asin(epsilon);
  for (int m = level; m >= 1; --m)
    if (std::ldexp(half_angle, m) >= std::numbers::pi) return (1.0 - epsilon) * harmonic(m);
  return 0.0;
}

inline std::string emit_profile_csv(const EscapeProfile& p) {
  std::string out = "angle,escape_radius\n";
  for (std::size_t k = 0; k < p.angles.size(); ++k)
    out += format_real(p.angles[k]) + "," + format_real(p.radii[k]) + "\n";
  return out;
}

inline std::string emit_ladder_csv(const std::vector<LadderRow>& rows) {
  std::string out = "level,dim,max_gap,min_escape_radius\n";
  for (const auto& r : rows)
    out += std::to_string(r.level) + "," + std::to_string(r.dim) + "," + format_real(r.max_gap) + "," +
           format_real(r.min_escape_radius) + "\n";
  return out;
}

}  // namespace projspec
