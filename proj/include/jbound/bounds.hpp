#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "convex.hpp"
#include "error.hpp"
#include "geom.hpp"
#include "minimize.hpp"
#include "quadrature.hpp"

namespace jbound {

enum class BoundMethod { Thm31, Thm41, SupBased };

inline const char* to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::Thm31:
      return "thm31";
    case BoundMethod::Thm41:
      return "thm41";
    case BoundMethod::SupBased:
      return "sup_based";
  }
  return "?";
}

struct BoundTerms {
  double mean_term = 0.0;
  double radius_penalty = 0.0;
  double norm_term = 0.0;
  double const_term = 0.0;
};

/// Upper bound for ln|f(z)| at the optimal radius, with its decomposition.
/// bound == sum of terms unless neg_infinity is set (f == 0).
struct BoundReport {
  CPoint z;
  double r_star = 0.0;
  double bound = 0.0;
  BoundTerms terms;
  BoundMethod method = BoundMethod::Thm31;
  bool neg_infinity = false;
  double feasible_lo = 0.0;
  double feasible_hi = 0.0;
};

namespace detail {

inline int check_point(CSpan z, const Domain& dom) {
  if (static_cast<int>(z.size()) != dom.dim()) throw Error(ErrorKind::InvalidArgument, "point dimension differs from domain");
  if (!dom.contains(z)) throw Error(ErrorKind::OutsideDomain, "z is not in the domain");
  return static_cast<int>(z.size());
}

// ln(n! / pi^n)
inline double log_dim_constant(int n) { return std::log(factorial(n)) - n * std::log(std::numbers::pi); }

inline BoundReport finish(CSpan z, BoundMethod m, const RadiusMinimum& opt, BoundTerms t) {
  BoundReport rep;
  rep.z.assign(z.begin(), z.end());
  rep.method = m;
  rep.r_star = opt.r_star;
  rep.feasible_lo = opt.feasible_lo;
  rep.feasible_hi = opt.feasible_hi;
  rep.terms = t;
  rep.bound = t.mean_term + t.radius_penalty + t.norm_term + t.const_term;
  if (rep.bound == -std::numeric_limits<double>::infinity()) rep.neg_infinity = true;
  return rep;
}

inline void check_norm(double norm) {
  if (!(norm >= 0.0) || std::isinf(norm)) throw Error(ErrorKind::InvalidArgument, "norm must be finite and >= 0");
}

// Shared by the mean- and sup-based forms: (1/p) inf_r (A(r) + 2n ln(1/r))
// + ln norm + (1/p) ln(n!/pi^n).
template <class Avg>
BoundReport log_norm_bound(const Avg& average, double norm, double p, CSpan z, const Domain& dom, BoundMethod m) {
  if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "exponent p must be > 0");
  check_norm(norm);
  const int n = check_point(z, dom);
  const double rmax = dom.dist_to_complement(z);
  const auto opt = minimize_over_r([&](double r) { return average(r) / p + (2.0 * n / p) * std::log(1.0 / r); }, rmax);
  BoundTerms t;
  t.mean_term = average(opt.r_star) / p;
  t.radius_penalty = (2.0 * n / p) * std::log(1.0 / opt.r_star);
  t.norm_term = norm == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(norm);
  t.const_term = log_dim_constant(n) / p;
  return finish(z, m, opt, t);
}

}  // namespace detail

/// ln|f(z)| <= (1/p) inf_r (B_w(z,r) + 2n ln(1/r)) + ln||f||_w + (1/p) ln(n!/pi^n).
inline BoundReport bound_thm31(double norm_w, const Weight& w, double p, CSpan z, const Domain& dom,
                               const QuadratureSpec& q) {
  return detail::log_norm_bound([&](double r) { return ball_mean(w, z, r, q); }, norm_w, p, z, dom,
                                BoundMethod::Thm31);
}

/// ln|f(z)| <= inf_r (B_v(z,r) + sup Phi^{-1}(n! N / (pi^n r^(2n)))), N = N_Phi(f; v).
/// Radii whose argument falls outside im Phi are skipped; the feasible
/// window is reported. For the exponential rule the sup-inverse term splits
/// into the same radius, norm and constant terms as bound_thm31.
inline BoundReport bound_thm41(double n_phi_value, const SupInverse& si, const Weight& v, CSpan z, const Domain& dom,
                               const QuadratureSpec& q) {
  if (!(n_phi_value >= 0.0) || std::isinf(n_phi_value))
    throw Error(ErrorKind::InvalidArgument, "N_Phi must be finite and >= 0");
  const int n = detail::check_point(z, dom);
  const double rmax = dom.dist_to_complement(z);
  const double lconst = detail::log_dim_constant(n);

  const auto* er = std::get_if<ExponentialRule>(&si.phi().rule());
  if (er && si.phi().domain() == Interval::real_line()) {
    const double p = er->p;
    const auto opt = minimize_over_r(
        [&](double r) { return ball_mean(v, z, r, q) + (2.0 * n / p) * std::log(1.0 / r); }, rmax);
    BoundTerms t;
    t.mean_term = ball_mean(v, z, opt.r_star, q);
    t.radius_penalty = (2.0 * n / p) * std::log(1.0 / opt.r_star);
    t.norm_term = n_phi_value == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(n_phi_value) / p;
    t.const_term = lconst / p;
    return detail::finish(z, BoundMethod::Thm41, opt, t);
  }

  auto penalty = [&](double r) {
    const double arg = std::exp(lconst - 2.0 * n * std::log(r)) * n_phi_value;
    if (!si.accepts(arg)) return std::numeric_limits<double>::infinity();
    return si.eval(arg);
  };
  RadiusMinimum opt;
  try {
    opt = minimize_over_r(
        [&](double r) {
          const double pen = penalty(r);
          if (pen == std::numeric_limits<double>::infinity()) return pen;
          return ball_mean(v, z, r, q) + pen;
        },
        rmax);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoFiniteValue) throw;
    throw Error(ErrorKind::EmptyFeasibleSet, "no radius puts the sup-inverse argument inside im Phi");
  }
  BoundTerms t;
  t.mean_term = ball_mean(v, z, opt.r_star, q);
  t.radius_penalty = penalty(opt.r_star);
  return detail::finish(z, BoundMethod::Thm41, opt, t);
}

/// Same shape as bound_thm31 with B_w replaced by the supremum of w over
/// the ball (estimated on quadrature and boundary nodes).
inline BoundReport bound_sup_based(double norm_w, const Weight& w, double p, CSpan z, const Domain& dom,
                                   const QuadratureSpec& q) {
  return detail::log_norm_bound([&](double r) { return ball_sup(w, z, r, q); }, norm_w, p, z, dom,
                                BoundMethod::SupBased);
}

/// Termwise a - b.
struct BoundComparison {
  double bound = 0.0;
  double mean_term = 0.0;
  double radius_penalty = 0.0;
  double norm_term = 0.0;
  double const_term = 0.0;
  double r_star = 0.0;
};

inline BoundComparison compare_bounds(const BoundReport& a, const BoundReport& b) {
  if (a.z != b.z) throw Error(ErrorKind::InvalidArgument, "compared reports must share z");
  auto diff = [](double x, double y) { return x == y ? 0.0 : x - y; };
  return {diff(a.bound, b.bound),
          diff(a.terms.mean_term, b.terms.mean_term),
          diff(a.terms.radius_penalty, b.terms.radius_penalty),
          diff(a.terms.norm_term, b.terms.norm_term),
          diff(a.terms.const_term, b.terms.const_term),
          diff(a.r_star, b.r_star)};
}

}  // namespace jbound
