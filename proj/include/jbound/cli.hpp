#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "config.hpp"
#include "convex.hpp"
#include "dbar.hpp"
#include "emit.hpp"
#include "error.hpp"
#include "geom.hpp"
#include "properties.hpp"

namespace jbound::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kInvalid = 2, kNumerical = 3 };

struct RunOptions {
  std::optional<OutputFormat> format;    // overrides "output" in the config
  std::optional<std::uint64_t> seed;     // overrides "seed" and quadrature seeds
  bool quiet = false;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"bound", "jensen-check", "fock-demo", "halfplane-demo", "dbar-check", "verify-all"};
  return names;
}

/// Failures that are numerical rather than caused by the input.
inline bool is_numerical(ErrorKind k) {
  return k == ErrorKind::Divergent || k == ErrorKind::QuadratureFailure || k == ErrorKind::NoFiniteValue ||
         k == ErrorKind::NonIntegrable;
}

inline json error_object(const Error& e) {
  json o{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (!e.field().empty()) o["field"] = e.field();
  if (e.clause() != 0) o["clause"] = e.clause();
  return json{{"error", o}};
}

namespace detail {

inline std::uint64_t required_seed(const config::Node& cfg, const RunOptions& opt) {
  if (opt.seed) return *opt.seed;
  if (!cfg.has("seed")) cfg.fail("a seed is required (config \"seed\" or --seed)");
  const long long s = cfg.at("seed").integer();
  if (s < 0) cfg.at("seed").fail("seed must be >= 0");
  return static_cast<std::uint64_t>(s);
}

inline std::uint64_t seed_or(const config::Node& cfg, const RunOptions& opt, std::uint64_t dflt) {
  if (opt.seed) return *opt.seed;
  return cfg.has("seed") ? static_cast<std::uint64_t>(cfg.at("seed").integer()) : dflt;
}

inline QuadratureSpec quadrature_of(const config::Node& cfg, const std::string& key, const RunOptions& opt,
                                    QuadratureSpec dflt = QuadratureSpec::polar_gauss()) {
  return cfg.has(key) ? config::quadrature(cfg.at(key), opt.seed) : dflt;
}

inline std::vector<std::string> point_columns(int n) {
  if (n == 1) return {"z_re", "z_im"};
  std::vector<std::string> cols;
  for (int k = 1; k <= n; ++k) {
    cols.push_back("z" + std::to_string(k) + "_re");
    cols.push_back("z" + std::to_string(k) + "_im");
  }
  return cols;
}

inline void push_point(std::vector<Cell>& row, CSpan z) {
  for (const auto& c : z) {
    row.emplace_back(c.real());
    row.emplace_back(c.imag());
  }
}

inline std::vector<Cell> bound_row(const BoundReport& b) {
  std::vector<Cell> row;
  push_point(row, b.z);
  row.insert(row.end(), {Cell(b.r_star), Cell(b.bound), Cell(b.terms.mean_term), Cell(b.terms.radius_penalty),
                         Cell(b.terms.norm_term), Cell(b.terms.const_term), Cell(std::string(to_string(b.method)))});
  return row;
}

// ---------------------------------------------------------------------------

inline void run_bound(const config::Node& cfg, const RunOptions& opt, Table& table) {
  const Domain dom = cfg.has("domain") ? config::domain(cfg.at("domain")) : Domain::full_space(1);
  const QuadratureSpec q = quadrature_of(cfg, "quadrature", opt);
  std::vector<std::string> methods;
  if (cfg.has("methods")) {
    const auto ms = cfg.at("methods");
    for (std::size_t i = 0; i < ms.size(); ++i) methods.push_back(ms.at(i).string());
  } else {
    methods.push_back(cfg.string_or("method", "thm31"));
  }
  for (std::size_t i = 0; i < methods.size(); ++i)
    if (methods[i] != "thm31" && methods[i] != "thm41" && methods[i] != "sup_based")
      cfg.fail("unknown method '" + methods[i] + "' (thm31, thm41, sup_based)");

  const std::vector<CPoint> zs =
      cfg.has("grid") ? config::grid(cfg.at("grid")) : std::vector<CPoint>{CPoint(static_cast<std::size_t>(dom.dim()), 0.0)};
  for (std::size_t i = 0; i < zs.size(); ++i)
    if (static_cast<int>(zs[i].size()) != dom.dim()) cfg.at("grid").fail("point " + std::to_string(i) + " has the wrong dimension");
  const std::optional<HoloFunction> f =
      cfg.has("function") ? std::optional<HoloFunction>(config::function(cfg.at("function"))) : std::nullopt;
  if (f && f->dim() != dom.dim()) cfg.at("function").fail("function dimension differs from domain");

  auto need = [&](const std::string& key) {
    if (!cfg.has(key)) cfg.fail("method needs \"" + key + "\"");
  };
  const double p = cfg.number_or("p", 2.0);
  if (!(p > 0.0)) cfg.at("p").fail("p must be > 0");

  std::optional<Weight> w;
  std::optional<double> norm;
  const bool wants_norm = std::find_if(methods.begin(), methods.end(), [](const std::string& m) { return m != "thm41"; }) != methods.end();
  if (wants_norm) {
    need("weight");
    w = config::weight(cfg.at("weight"));
    if (cfg.has("norm")) {
      norm = cfg.at("norm").finite_number();
      if (*norm < 0.0) cfg.at("norm").fail("norm must be >= 0");
    } else {
      if (!f) cfg.fail("thm31/sup_based need \"norm\" or \"function\"");
      norm = weighted_norm(*f, p, *w, dom, q);
    }
  }
  std::optional<SupInverse> si;
  std::optional<Weight> v;
  std::optional<double> nphi;
  if (std::find(methods.begin(), methods.end(), "thm41") != methods.end()) {
    need("phi");
    const ConvexFunction phi = config::convex(cfg.at("phi"));
    si = config::build(cfg.at("phi"), [&] { return sup_inverse(phi); });
    if (cfg.has("v")) {
      v = config::weight(cfg.at("v"));
    } else {
      need("weight");
      v = config::weight(cfg.at("weight")).scaled(1.0 / p);
    }
    if (cfg.has("n_phi")) {
      nphi = cfg.at("n_phi").finite_number();
      if (*nphi < 0.0) cfg.at("n_phi").fail("N_Phi must be >= 0");
    } else {
      if (!f) cfg.fail("thm41 needs \"n_phi\" or \"function\"");
      nphi = n_phi(*f, *v, phi, dom, q);
    }
  }

  table.columns = point_columns(dom.dim());
  for (const char* c : {"r_star", "bound", "mean_term", "radius_penalty", "norm_term", "const_term", "method"})
    table.columns.emplace_back(c);
  for (const auto& z : zs) {
    for (const auto& m : methods) {
      if (m == "thm31") table.add(bound_row(bound_thm31(*norm, *w, p, z, dom, q)));
      if (m == "sup_based") table.add(bound_row(bound_sup_based(*norm, *w, p, z, dom, q)));
      if (m == "thm41") table.add(bound_row(bound_thm41(*nphi, *si, *v, z, dom, q)));
    }
  }
}

inline void run_jensen_check(const config::Node& cfg, const RunOptions& opt, Table& table) {
  const long long trials = cfg.integer_or("trials", 10000);
  if (trials < 1) cfg.at("trials").fail("trials must be >= 1");
  const long long atoms = cfg.integer_or("max_atoms", 16);
  if (atoms < 2) cfg.at("max_atoms").fail("max_atoms must be >= 2");
  const std::uint64_t seed = required_seed(cfg, opt);
  const auto s = run_jensen_trials(trials, seed, static_cast<int>(atoms));
  table.columns = {"trials", "violations", "worst_relative_slack", "equality_trials", "equality_max_error", "seed"};
  table.add({Cell(static_cast<long long>(s.trials)), Cell(static_cast<long long>(s.violations)), Cell(s.worst_relative_slack),
             Cell(static_cast<long long>(s.equality_trials)), Cell(s.equality_max_error), Cell(static_cast<long long>(seed))});
}

/// Closed-form Fock quantities: ln(1/sqrt(pi)) + |z|^2/2 + ln sqrt(e/2).
inline double fock_closed_form(CSpan z) {
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  return -0.5 * std::log(std::numbers::pi) + 0.5 * s + 0.5 * (1.0 - std::log(2.0));
}

inline void run_fock_demo(const config::Node& cfg, const RunOptions& opt, Table& table) {
  const QuadratureSpec q = quadrature_of(cfg, "quadrature", opt);
  const HoloFunction f = cfg.has("function") ? config::function(cfg.at("function")) : HoloFunction::poly({1.0});
  if (f.dim() != 1) cfg.at("function").fail("fock-demo runs in C (n = 1)");
  const std::vector<CPoint> zs = cfg.has("grid") ? config::grid(cfg.at("grid")) : std::vector<CPoint>{{Complex(0.0)}};
  for (std::size_t i = 0; i < zs.size(); ++i)
    if (zs[i].size() != 1) cfg.at("grid").fail("points must lie in C");
  const Domain dom = Domain::full_space(1);
  const Weight w = Weight::abs_sq();
  table.columns = {"z_re", "z_im", "r_star", "bound", "closed_form", "log_abs_f", "norm", "gap_factor"};
  const double norm = weighted_norm(f, 2.0, w, dom, q);
  for (const auto& z : zs) {
    const BoundReport b = bound_thm31(norm, w, 2.0, z, dom, q);
    // exp(bound) / (||f|| e^{|z|^2/2} / sqrt(pi))
    const double gap = std::exp(b.bound - std::log(norm) - 0.5 * std::norm(z[0]) + 0.5 * std::log(std::numbers::pi));
    table.add({Cell(z[0].real()), Cell(z[0].imag()), Cell(b.r_star), Cell(b.bound), Cell(fock_closed_form(z) + std::log(norm)),
               Cell(f.log_abs(z)), Cell(norm), Cell(gap)});
  }
}

/// Penalty gap between the mean-based and sup-based half-plane bounds with
/// Im z = h: the sup-based penalty is 2 + 2 ln(1/2) for h >= 2 and
/// h + 2 ln(1/h) below, the mean-based one 2 ln(1/h).
inline double halfplane_expected_difference(double h) {
  const double sup_pen = h >= 2.0 ? 2.0 + 2.0 * std::log(0.5) : h + 2.0 * std::log(1.0 / h);
  return 2.0 * std::log(1.0 / h) - sup_pen;
}

struct HalfPlaneRow {
  double h, x;
  BoundReport mean_based, sup_based;
  BoundComparison diff;
};

inline HalfPlaneRow halfplane_pair(double x, double h, double nphi, const QuadratureSpec& q) {
  const Domain dom = Domain::half_plane();
  const CPoint z{Complex(x, h)};
  const SupInverse si = sup_inverse(ConvexFunction::exponential(1.0));
  const double norm = nphi;  // p = 1: ||f|| = N_Phi
  BoundReport a = bound_thm41(nphi, si, Weight::im_part(), z, dom, q);
  BoundReport b = bound_sup_based(norm, Weight::im_part(), 1.0, z, dom, q);
  const BoundComparison d = compare_bounds(a, b);
  return {h, x, std::move(a), std::move(b), d};
}

inline void run_halfplane_demo(const config::Node& cfg, const RunOptions& opt, Table& table) {
  const QuadratureSpec q = quadrature_of(cfg, "quadrature", opt);
  std::vector<double> hs{2.0, 5.0, 10.0, 100.0};
  if (cfg.has("heights")) {
    hs.clear();
    const auto n = cfg.at("heights");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double h = n.at(i).finite_number();
      if (!(h > 0.0)) n.at(i).fail("Im z must be > 0");
      hs.push_back(h);
    }
  }
  const double x = cfg.number_or("x", 0.0);
  const double nphi = cfg.number_or("n_phi", 1.0);
  if (!(nphi > 0.0)) cfg.at("n_phi").fail("N_Phi must be > 0");
  table.columns = {"re_z", "im_z", "thm41_bound", "thm41_r_star", "sup_bound", "sup_r_star", "difference", "expected_difference"};
  for (double h : hs) {
    const auto r = halfplane_pair(x, h, nphi, q);
    table.add({Cell(x), Cell(h), Cell(r.mean_based.bound), Cell(r.mean_based.r_star), Cell(r.sup_based.bound),
               Cell(r.sup_based.r_star), Cell(r.diff.bound), Cell(halfplane_expected_difference(h))});
  }
}

/// Three bump data used when the config lists none.
inline std::vector<BumpFunction> default_bumps() {
  return {BumpFunction({{1.0, 0, 0}}, 1.0),
          BumpFunction({{Complex(1.0, 0.5), 1, 0}, {0.5, 0, 1}}, 1.0),
          BumpFunction({{0.3, 0, 0}, {Complex(0.0, 1.0), 2, 0}, {-0.7, 1, 1}, {0.4, 0, 2}}, 1.5)};
}

struct DbarSample {
  Complex z;
  double r;
};

/// Random admissible (z, r): z uniform in the disc |z| < z_radius, r uniform
/// in [r_lo, r_hi].
inline std::vector<DbarSample> dbar_samples(std::mt19937_64& rng, long count, double z_radius, double r_lo, double r_hi) {
  std::vector<DbarSample> out;
  for (long i = 0; i < count; ++i) {
    const double rad = z_radius * std::sqrt(unit_uniform(rng));
    const double th = 2.0 * std::numbers::pi * unit_uniform(rng);
    out.push_back({std::polar(rad, th), uniform_in(rng, r_lo, r_hi)});
  }
  return out;
}

inline void run_dbar_check(const config::Node& cfg, const RunOptions& opt, Table& table) {
  std::vector<BumpFunction> bumps;
  if (cfg.has("bumps")) {
    const auto bs = cfg.at("bumps");
    for (std::size_t i = 0; i < bs.size(); ++i) bumps.push_back(config::bump(bs.at(i)));
  } else {
    bumps = default_bumps();
  }
  const Weight v = cfg.has("v") ? config::weight(cfg.at("v")) : Weight::constant(0.0);
  const double a = cfg.number_or("a", 2.0);
  if (!(a > 0.0)) cfg.at("a").fail("a must be > 0");
  const QuadratureSpec q = quadrature_of(cfg, "quadrature", opt);
  const QuadratureSpec ball = quadrature_of(cfg, "ball_quadrature", opt, QuadratureSpec::polar_gauss(16, 32));
  if (ball.kind != QuadratureKind::PolarGauss) cfg.at("ball_quadrature").fail("ball means in C use polar-gauss");

  std::vector<DbarSample> explicit_checks;
  if (cfg.has("checks")) {
    const auto cs = cfg.at("checks");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const auto c = cs.at(i);
      const double r = c.at("r").finite_number();
      if (!(r > 0.0) || !(r < 1.0)) c.at("r").fail("radius must satisfy 0 < r < 1");
      explicit_checks.push_back({c.at("z").complex(), r});
    }
  }
  const long long samples = cfg.integer_or("samples", cfg.has("checks") ? 0 : 100);
  if (samples < 0) cfg.at("samples").fail("samples must be >= 0");
  double r_lo = 0.05, r_hi = 0.95;
  if (cfg.has("r_range")) {
    const auto rr = cfg.at("r_range");
    if (rr.size() != 2) rr.fail("expected [lo, hi]");
    r_lo = rr.at(0).finite_number();
    r_hi = rr.at(1).finite_number();
    if (!(r_lo > 0.0) || !(r_hi < 1.0) || !(r_lo <= r_hi)) rr.fail("need 0 < lo <= hi < 1");
  }
  std::mt19937_64 rng(samples > 0 ? required_seed(cfg, opt) : 0);

  table.columns = {"bump", "z_re", "z_im", "r", "lhs", "rhs", "slack", "const_a_used", "premise_holds", "weighted_norm_sq",
                   "j_value", "jensen_step_slack", "inclusion_step_slack", "degenerate", "dbar_residual"};
  for (std::size_t b = 0; b < bumps.size(); ++b) {
    const double zr = cfg.number_or("z_radius", 2.0 * bumps[b].support_radius());
    if (!(zr > 0.0)) cfg.at("z_radius").fail("z_radius must be > 0");
    const DbarProblem prob(DbarData{bumps[b], v, a}, q);
    const double resid = dbar_residual(prob.solution());
    std::vector<DbarSample> pts = explicit_checks;
    const auto rnd = dbar_samples(rng, samples, zr, r_lo, r_hi);
    pts.insert(pts.end(), rnd.begin(), rnd.end());
    for (const auto& s : pts) {
      const auto rep = prob.check(s.z, s.r, ball);
      table.add({Cell(static_cast<long long>(b)), Cell(s.z.real()), Cell(s.z.imag()), Cell(s.r), Cell(rep.lhs), Cell(rep.rhs),
                 Cell(rep.slack), Cell(rep.const_a_used), Cell(rep.premise_holds), Cell(rep.weighted_norm_sq), Cell(rep.j_value),
                 Cell(rep.jensen_step_slack), Cell(rep.inclusion_step_slack), Cell(rep.degenerate), Cell(resid)});
    }
  }
}

// verify-all: a quick built-in check list; one row per check.
inline bool run_verify_all(const config::Node& cfg, const RunOptions& opt, Table& table) {
  const std::uint64_t seed = seed_or(cfg, opt, 0);
  const QuadratureSpec q = QuadratureSpec::polar_gauss();
  table.columns = {"check", "passed", "value", "expected", "tolerance"};
  bool all = true;
  auto row = [&](const std::string& name, double value, double expected, double tol) {
    const bool ok = std::abs(value - expected) <= tol;
    all = all && ok;
    table.add({Cell(name), Cell(ok), Cell(value), Cell(expected), Cell(tol)});
  };

  const Domain full = Domain::full_space(1);
  const double norm1 = weighted_norm(HoloFunction::poly({1.0}), 2.0, Weight::abs_sq(), full, q);
  row("fock_norm_of_one", norm1, std::sqrt(std::numbers::pi), 1e-6 * std::sqrt(std::numbers::pi));
  const BoundReport fb = bound_thm31(norm1, Weight::abs_sq(), 2.0, CPoint{Complex(0.0)}, full, q);
  row("fock_r_star", fb.r_star, std::sqrt(2.0), 1e-8);
  row("fock_gap_factor", std::exp(fb.bound) * std::sqrt(std::numbers::pi) / norm1, std::sqrt(std::exp(1.0) / 2.0), 1e-6);

  for (double h : {2.0, 10.0, 100.0}) {
    const auto r = halfplane_pair(0.0, h, 1.0, q);
    row("halfplane_difference_h" + format_double(h), r.diff.bound, halfplane_expected_difference(h), 1e-9);
  }

  const auto jt = run_jensen_trials(1000, seed);
  row("jensen_violations", static_cast<double>(jt.violations), 0.0, 0.0);
  row("jensen_equality_error", jt.equality_max_error, 0.0, 1e-12);

  row("supinv_power2_at4", sup_inverse(ConvexFunction::power(2.0)).eval(4.0), 2.0, 1e-12);
  row("supinv_exp2_at1", sup_inverse(ConvexFunction::exponential(2.0)).eval(1.0), 0.0, 1e-12);
  const auto remark = ConvexFunction::piecewise_linear({{-1.0, 1.0}, {0.0, 0.0}, {3.0, 3.0}}, {{-1.0, 2.0}});
  row("supinv_override_example_at2", sup_inverse(remark).eval(2.0), 2.0, 1e-12);

  row("harmonic_mean_im", ball_mean(Weight::im_part(), CPoint{Complex(0.0, 1.0)}, 0.5, q), 1.0, 1e-8);

  const Weight w = Weight::abs_sq();
  const CPoint z{Complex(0.5, 0.5)};
  const double b31 = bound_thm31(1.5, w, 2.0, z, full, q).bound;
  const double b41 = bound_thm41(1.5 * 1.5, sup_inverse(ConvexFunction::exponential(2.0)), w.scaled(0.5), z, full, q).bound;
  row("thm41_specialization", b41, b31, 1e-12);

  const DbarProblem prob(DbarData{default_bumps()[1], Weight::constant(0.0), 2.0}, q);
  row("dbar_residual", dbar_residual(prob.solution()), 0.0, 1e-3);
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : dbar_samples(rng, 10, 2.0, 0.05, 0.95))
    worst = std::min(worst, prob.check(s.z, s.r, QuadratureSpec::polar_gauss(16, 32)).slack);
  const bool ok = worst >= -1e-6;
  all = all && ok;
  table.add({Cell(std::string("dbar_chain_min_slack")), Cell(ok), Cell(worst), Cell(0.0), Cell(-1e-6)});
  return all;
}

}  // namespace detail

/// Runs one command. Rows go to `out`; error objects and notes go to `err`.
/// Exit codes: 0 success, 1 verify-all found failures, 2 invalid input,
/// 3 numerical failure (rows computed so far are written and marked).
inline int run(const std::string& command, const json& cfg_json, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  Table table;
  OutputFormat fmt = OutputFormat::Csv;
  try {
    const config::Node cfg(cfg_json, "");
    if (!cfg_json.is_object()) cfg.fail("config must be a JSON object");
    if (cfg.has("command") && cfg.at("command").string() != command)
      cfg.at("command").fail("config is for '" + cfg.at("command").string() + "', not '" + command + "'");
    const std::string f = cfg.string_or("output", "csv");
    if (f != "csv" && f != "json") cfg.at("output").fail("output must be csv or json");
    fmt = opt.format.value_or(f == "json" ? OutputFormat::Json : OutputFormat::Csv);

    bool passed = true;
    if (command == "bound") {
      detail::run_bound(cfg, opt, table);
    } else if (command == "jensen-check") {
      detail::run_jensen_check(cfg, opt, table);
    } else if (command == "fock-demo") {
      detail::run_fock_demo(cfg, opt, table);
    } else if (command == "halfplane-demo") {
      detail::run_halfplane_demo(cfg, opt, table);
    } else if (command == "dbar-check") {
      detail::run_dbar_check(cfg, opt, table);
    } else if (command == "verify-all") {
      passed = detail::run_verify_all(cfg, opt, table);
    } else {
      throw Error::config("command", "unknown command '" + command + "'");
    }
    emit(table, fmt, out);
    if (!passed) {
      if (!opt.quiet) err << "verify-all: some checks failed\n";
      return kChecksFailed;
    }
    return kOk;
  } catch (const Error& e) {
    if (!is_numerical(e.kind())) {
      err << error_object(e).dump() << "\n";
      return kInvalid;
    }
    // Numerical failure: flush what was computed, marked as incomplete.
    if (fmt == OutputFormat::Csv) {
      emit_csv(table, out);
      out << "# incomplete: " << to_string(e.kind()) << ": " << e.what() << "\r\n";
    } else {
      out << "{\"incomplete\": true, \"error\": " << error_object(e)["error"].dump() << ", \"rows\": ";
      emit_json(table, out);
      out << "}\n";
    }
    out.flush();
    err << error_object(e).dump() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << json{{"error", {{"kind", "Internal"}, {"message", e.what()}}}}.dump() << "\n";
    return kNumerical;
  }
}

}  // namespace jbound::cli
