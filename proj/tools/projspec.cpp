#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "projspec/agmon.hpp"
#include "projspec/commute.hpp"
#include "projspec/detpoly.hpp"
#include "projspec/linegeom.hpp"
#include "projspec/plot.hpp"
#include "projspec/riesz.hpp"

namespace {

using namespace projspec;

constexpr int kAffirmative = 0;
constexpr int kNegative = 1;
constexpr int kFailure = 2;

// Dense emission of the example operator stops here; larger levels use --diagonal.
constexpr int kMaxDenseLevel = 10;

struct TolFlags {
  std::optional<double> normal, eig, unitary, line, recon, commute;
};

struct RunConfig {
  std::vector<std::string> inputs;
  std::string output;
  std::uint64_t seed = 0;
  TolFlags tol_flags;
  Tolerances tol;
};

void add_tol_flags(CLI::App* sub, TolFlags& f) {
  sub->add_option("--tol-normal", f.normal, "normality tolerance (relative to |A|_F^2)");
  sub->add_option("--tol-eig", f.eig, "eigen-residual tolerance");
  sub->add_option("--tol-unitary", f.unitary, "unitarity tolerance");
  sub->add_option("--tol-line", f.line, "line merge tolerance");
  sub->add_option("--tol-recon", f.recon, "arrangement reconstruction tolerance");
  sub->add_option("--tol-commute", f.commute, "commutator tolerance");
}

Tolerances resolve_tolerances(const TolFlags& f) {
  Tolerances t;
  if (const char* env = std::getenv("PROJSPEC_TOL")) {
    double v = 0.0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end || !(v > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "PROJSPEC_TOL must be a positive number");
    }
    t.normal = t.eig = t.unitary = t.line = t.recon = t.commute = v;
  }
  if (f.normal) t.normal = *f.normal;
  if (f.eig) t.eig = *f.eig;
  if (f.unitary) t.unitary = *f.unitary;
  if (f.line) t.line = *f.line;
  if (f.recon) t.recon = *f.recon;
  if (f.commute) t.commute = *f.commute;
  return t;
}

void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty() || cfg.output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + cfg.output + "'");
  f << text;
  if (!f) throw Error(ErrorCode::InvalidArgument, "write to '" + cfg.output + "' failed");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

CMatrix load_matrix(const std::string& path) { return parse_matrix(read_file(path)); }

// Accepts `<re>` or `<re><sign><im>i`.
Cplx parse_scalar(const std::string& text, const char* what) {
  Cplx z;
  if (parse_complex(text, z)) return z;
  double re = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), re);
  if (ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(re)) return re;
  throw Error(ErrorCode::InvalidArgument, std::string("malformed ") + what + " '" + text + "'");
}

std::string flag(bool b) { return b ? "true" : "false"; }

std::string emit_values(const std::vector<Cplx>& values) {
  std::string out = "values " + std::to_string(values.size()) + "\n";
  for (const auto& v : values) out += format_real(v.real()) + " " + format_real(v.imag()) + "\n";
  return out;
}

std::string emit_vector(const CVector& v) {
  std::string out = "vector " + std::to_string(v.size()) + "\n";
  for (Index i = 0; i < v.size(); ++i) out += format_real(v(i).real()) + " " + format_real(v(i).imag()) + "\n";
  return out;
}

BivarPoly load_poly(const RunConfig& cfg) {
  if (cfg.inputs.size() == 1) return parse_bipoly(read_file(cfg.inputs[0]));
  if (cfg.inputs.size() == 2) return char_poly_pair(load_matrix(cfg.inputs[0]), load_matrix(cfg.inputs[1]));
  throw Error(ErrorCode::InvalidArgument, "expected a polynomial file or two matrix files");
}

std::vector<Cplx> load_spectrum(const RunConfig& cfg) {
  return eig_normal(load_matrix(cfg.inputs.at(0)), cfg.tol).values;
}

int run_eig(const RunConfig& cfg) {
  const auto d = eig_normal(load_matrix(cfg.inputs.at(0)), cfg.tol);
  write_output(cfg, "residual=" + format_real(d.residual) + "\n" + emit_values(d.values) + "unitary=\n" +
                        emit_matrix(d.unitary));
  return kAffirmative;
}

int run_detpoly(const RunConfig& cfg, int budget) {
  DetPolyOptions opt;
  opt.degree_budget = budget;
  write_output(cfg, emit_bipoly(char_poly_pair(load_matrix(cfg.inputs.at(0)), load_matrix(cfg.inputs.at(1)), opt)));
  return kAffirmative;
}

int run_lines(const RunConfig& cfg) {
  const auto verdict = factor_lines(load_poly(cfg), {cfg.seed, cfg.tol});
  std::string out = std::string("verdict=") + (verdict.is_lines() ? "lines" : "notlines") + "\n";
  out += "recon_error=" + format_real(verdict.recon_error) + "\n";
  out += "degree_deficit=" + std::to_string(verdict.degree_deficit) + "\n";
  if (verdict.is_lines()) {
    out += "lines=\n" + emit_arrangement(verdict.arrangement());
  } else {
    const auto& w = verdict.witness();
    out += "witness=" + format_complex(w.z) + " " + format_complex(w.w) + "\n";
    out += "witness_residual=" + format_real(w.residual) + "\n";
    out += "witness_line_distance=" + format_real(w.line_distance) + "\n";
  }
  write_output(cfg, out);
  return verdict.is_lines() ? kAffirmative : kNegative;
}

int run_agmon(const RunConfig& cfg, int terms) {
  const auto spectrum = load_spectrum(cfg);
  const auto w = strong_agmon_check(spectrum);
  if (!w) {
    write_output(cfg, "sector=none\n");
    return kNegative;
  }
  const auto check = verify_witness(spectrum, witness_sequence(*w, terms), w->epsilon);
  std::string out = "sector=found\n";
  out += "theta=" + format_real(w->theta) + "\n";
  out += "delta=" + format_real(w->delta) + "\n";
  out += "max_gap=" + format_real(w->max_gap()) + "\n";
  out += "epsilon=" + format_real(w->epsilon) + "\n";
  out += "rotation=" + format_real(w->rotation()) + "\n";
  out += "witness_terms=" + std::to_string(terms) + "\n";
  out += "witness_min_modulus=" + format_real(check.modulus) + "\n";
  out += "witness_ok=" + flag(check.ok) + "\n";
  write_output(cfg, out);
  return check.ok ? kAffirmative : kNegative;
}

int run_escape(const RunConfig& cfg, double eps, int angles) {
  write_output(cfg, emit_profile_csv(escape_radius_profile(load_spectrum(cfg), eps, angles)));
  return kAffirmative;
}

int run_example(const RunConfig& cfg, int level, int ladder, bool diagonal, double eps, int angles) {
  if ((level > 0) == (ladder > 0)) throw Error(ErrorCode::InvalidArgument, "give exactly one of --level, --ladder");
  if (ladder > 0) {
    write_output(cfg, emit_ladder_csv(example_ladder(ladder, eps, angles)));
    return kAffirmative;
  }
  const auto spectrum = example_spectrum(level);
  if (diagonal) {
    write_output(cfg, emit_values(spectrum));
    return kAffirmative;
  }
  if (level > kMaxDenseLevel) {
    throw Error(ErrorCode::LevelTooLarge, "dense output stops at level " + std::to_string(kMaxDenseLevel) +
                                              "; use --diagonal");
  }
  write_output(cfg, emit_matrix(CMatrix(example_operator(level))));
  return kAffirmative;
}

int run_riesz(const RunConfig& cfg, const std::string& center, double radius, int nodes) {
  const auto r = riesz_projection(load_matrix(cfg.inputs.at(0)), {parse_scalar(center, "center"), radius, nodes},
                                  cfg.tol);
  std::string out;
  out += "idempotency_residual=" + format_real(r.idempotency_residual) + "\n";
  out += "commutation_residual=" + format_real(r.commutation_residual) + "\n";
  out += "trace=" + format_complex(r.trace) + "\n";
  out += "rank_estimate=" + std::to_string(r.rank_estimate) + "\n";
  out += "projection=\n" + emit_matrix(r.projection);
  write_output(cfg, out);
  return kAffirmative;
}

int run_perturb(const RunConfig& cfg, const std::string& lambda_text, const std::string& mu_text,
                const std::string& center_text, double radius, int nodes, const std::vector<double>& eps,
                bool first_order) {
  const CMatrix a = load_matrix(cfg.inputs.at(0)), b = load_matrix(cfg.inputs.at(1));
  const Cplx lambda = parse_scalar(lambda_text, "lambda");
  const Cplx center = center_text.empty() ? lambda : parse_scalar(center_text, "center");
  const Contour c{center, radius, nodes};
  if (first_order) {
    write_output(cfg, emit_matrix(first_order_term(a, b, c, cfg.tol)));
    return kAffirmative;
  }
  const auto rep = perturbation_check(a, b, lambda, parse_scalar(mu_text, "mu"), c, eps, cfg.tol);
  std::cerr << "slope=" << format_real(rep.slope) << "\nexact=" << flag(rep.exact)
            << "\ncertified=" << flag(rep.certified()) << "\n";
  write_output(cfg, emit_slope_csv(rep));
  return rep.certified() ? kAffirmative : kNegative;
}

int run_lemma34(const RunConfig& cfg, const std::string& mu_text, const std::vector<std::string>& z_text) {
  std::vector<Cplx> zs;
  for (const auto& z : z_text) zs.push_back(parse_scalar(z, "z"));
  const auto r = lemma34_solver(load_matrix(cfg.inputs.at(0)), load_matrix(cfg.inputs.at(1)),
                                parse_scalar(mu_text, "mu"), zs, cfg.tol);
  std::string out;
  out += "residual_a=" + format_real(r.residual_a) + "\n";
  out += "residual_b=" + format_real(r.residual_b) + "\n";
  out += "steps=" + std::to_string(r.zs.size()) + "\n";
  out += emit_vector(r.vector);
  write_output(cfg, out);
  return kAffirmative;
}

int verdict_code(bool indeterminate, bool consistent, bool affirmative) {
  if (indeterminate || !consistent) return kFailure;
  return affirmative ? kAffirmative : kNegative;
}

int run_commute(const RunConfig& cfg) {
  EquivalenceOptions opt;
  opt.seed = cfg.seed;
  opt.tol = cfg.tol;
  const auto r = equivalence_check(load_matrix(cfg.inputs.at(0)), load_matrix(cfg.inputs.at(1)), opt);
  write_output(cfg, emit_equivalence_report(r));
  return verdict_code(r.status == Outcome::Indeterminate, r.consistent, r.commute);
}

int run_tuple(const RunConfig& cfg) {
  EquivalenceOptions opt;
  opt.seed = cfg.seed;
  opt.tol = cfg.tol;
  const auto t = parse_tuple(read_file(cfg.inputs.at(0)));
  const auto r = tuple_test(t, opt);
  write_output(cfg, emit_tuple_report(r, t.size()));
  return verdict_code(r.indeterminate, r.consistent, r.commutative);
}

int run_plot(const RunConfig& cfg, double from, double to, int samples, const std::string& svg) {
  const auto pts = plot_slice(load_poly(cfg), from, to, samples);
  if (!svg.empty()) write_file(svg, emit_slice_svg(pts, samples));
  write_output(cfg, emit_slice_csv(pts));
  return kAffirmative;
}

int negative_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotCommuting:
    case ErrorCode::LineNotInSpectrum: return kNegative;
    default: return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projective spectra of operator pairs and tuples"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto base = [&](const char* name, const char* help, std::size_t inputs, bool seeded = false) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("inputs", cfg.inputs, "input files")->expected(static_cast<int>(inputs))->required();
    sub->add_option("-o,--output", cfg.output, "output file (default stdout)");
    add_tol_flags(sub, cfg.tol_flags);
    if (seeded) sub->add_option("--seed", cfg.seed, "random seed for slice rays");
    return sub;
  };

  auto* eig = base("eig", "eigendecomposition of a normal matrix", 1);

  int budget = kDefaultDegreeBudget;
  auto* detpoly = base("detpoly", "coefficients of det(I + zA + wB)", 2);
  detpoly->add_option("--degree-budget", budget, "largest admissible dimension");

  auto* lines = app.add_subcommand("lines", "decide whether a determinantal curve is a union of lines");
  lines->add_option("inputs", cfg.inputs, "polynomial file, or two matrix files")->expected(1, 2)->required();
  lines->add_option("-o,--output", cfg.output, "output file (default stdout)");
  lines->add_option("--seed", cfg.seed, "random seed for slice rays");
  add_tol_flags(lines, cfg.tol_flags);

  int terms = 100;
  auto* agmon = base("agmon", "eigenvalue-free sector and its escape certificate", 1);
  agmon->add_option("--terms", terms, "escape sequence terms to verify")->check(CLI::PositiveNumber);

  double eps = 0.5;
  int angles = 4096;
  auto* escape = base("escape", "escape radius profile as CSV", 1);
  escape->add_option("--eps", eps, "escape constant in (0, 1)");
  escape->add_option("--angles", angles, "number of directions");

  int level = 0, ladder = 0;
  bool diagonal = false;
  auto* example = app.add_subcommand("example", "truncations of the diagonal counterexample");
  example->add_option("--level", level, "emit the level-N truncation");
  example->add_option("--ladder", ladder, "emit the ladder CSV for levels 1..N");
  example->add_flag("--diagonal", diagonal, "emit only the diagonal entries");
  example->add_option("--eps", eps, "escape constant for the ladder");
  example->add_option("--angles", angles, "directions per ladder level");
  example->add_option("-o,--output", cfg.output, "output file (default stdout)");
  add_tol_flags(example, cfg.tol_flags);

  std::string center, lambda_text, mu_text;
  double radius = 0.0;
  int nodes = kAutoNodes;
  auto* riesz = base("riesz", "Riesz projection for a circular contour", 1);
  riesz->add_option("--center", center, "contour centre")->required();
  riesz->add_option("--radius", radius, "contour radius")->required();
  riesz->add_option("--nodes", nodes, "quadrature nodes (0 picks them from the spectrum)");

  std::vector<double> eps_list{1e-2, 1e-3, 1e-4};
  bool first_order = false;
  auto* perturb = base("perturb", "second-order remainder of the eigenvalue perturbation", 2);
  perturb->add_option("--lambda", lambda_text, "isolated eigenvalue of A")->required();
  perturb->add_option("--mu", mu_text, "first-order eigenvalue shift")->default_val("0");
  perturb->add_option("--center", center, "contour centre (default lambda)");
  perturb->add_option("--radius", radius, "contour radius")->required();
  perturb->add_option("--nodes", nodes, "quadrature nodes (0 picks them from the spectrum)");
  perturb->add_option("--eps", eps_list, "perturbation sizes")->delimiter(',');
  perturb->add_flag("--first-order", first_order, "emit the first-order projection term instead");

  std::vector<std::string> z_text;
  auto* lemma34 = base("lemma34", "common eigenvector from an escape sequence", 2);
  lemma34->add_option("--mu", mu_text, "eigenvalue of B with |mu| = |B|")->required();
  lemma34->add_option("--z", z_text, "escape sequence (default e^{i rotation} 10^n)")->delimiter(',');

  auto* commute = base("commute", "commutativity versus line structure of a normal pair", 2, true);
  auto* tuple = base("tuple", "pairwise check of an operator tuple", 1, true);

  double from = -1.0, to = 1.0;
  int samples = 41;
  std::string svg;
  auto* plot = app.add_subcommand("plot-slice", "slice roots of det(I + zA + wB) along real w");
  plot->add_option("inputs", cfg.inputs, "polynomial file, or two matrix files")->expected(1, 2)->required();
  plot->add_option("-o,--output", cfg.output, "CSV output (default stdout)");
  plot->add_option("--from", from, "sweep start");
  plot->add_option("--to", to, "sweep end");
  plot->add_option("--samples", samples, "sweep samples");
  plot->add_option("--svg", svg, "also write an SVG scatter");
  add_tol_flags(plot, cfg.tol_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFailure;
  }

  try {
    cfg.tol = resolve_tolerances(cfg.tol_flags);
    if (eig->parsed()) return run_eig(cfg);
    if (detpoly->parsed()) return run_detpoly(cfg, budget);
    if (lines->parsed()) return run_lines(cfg);
    if (agmon->parsed()) return run_agmon(cfg, terms);
    if (escape->parsed()) return run_escape(cfg, eps, angles);
    if (example->parsed()) return run_example(cfg, level, ladder, diagonal, eps, angles);
    if (riesz->parsed()) return run_riesz(cfg, center, radius, nodes);
    if (perturb->parsed()) return run_perturb(cfg, lambda_text, mu_text, center, radius, nodes, eps_list, first_order);
    if (lemma34->parsed()) return run_lemma34(cfg, mu_text, z_text);
    if (commute->parsed()) return run_commute(cfg);
    if (tuple->parsed()) return run_tuple(cfg);
    if (plot->parsed()) return run_plot(cfg, from, to, samples, svg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line() << ", column " << e.column() << ")\n";
    return kFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return negative_error(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
