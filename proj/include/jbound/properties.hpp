#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "convex.hpp"
#include "jensen.hpp"
#include "measure.hpp"

namespace jbound {

/// Uniform double in (0, 1) from the top 53 bits; platform independent.
inline double unit_uniform(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

/// Random convex piecewise-linear function with 2..max_points breakpoints in
/// [-5, 5] and nondecreasing slopes in [-3, 3], on the closed hull of the
/// breakpoints.
inline ConvexFunction random_pwl_convex(std::mt19937_64& rng, int max_points = 8) {
  const int k = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_points - 1));
  std::vector<double> ts(k), slopes(k - 1);
  for (double& t : ts) t = uniform_in(rng, -5.0, 5.0);
  for (double& s : slopes) s = uniform_in(rng, -3.0, 3.0);
  std::sort(ts.begin(), ts.end());
  std::sort(slopes.begin(), slopes.end());
  for (int i = 1; i < k; ++i)
    if (!(ts[i] > ts[i - 1])) ts[i] = std::nextafter(ts[i - 1], 1e300) + 1e-9;
  std::vector<std::pair<double, double>> pts;
  double v = uniform_in(rng, -2.0, 2.0);
  pts.emplace_back(ts[0], v);
  for (int i = 1; i < k; ++i) {
    v += slopes[i - 1] * (ts[i] - ts[i - 1]);
    pts.emplace_back(ts[i], v);
  }
  return ConvexFunction::piecewise_linear(std::move(pts));
}

struct JensenTrialSummary {
  long trials = 0;
  long violations = 0;
  double worst_relative_slack = std::numeric_limits<double>::infinity();  // min (rhs - lhs)/(1 + |rhs|)
  long equality_trials = 0;
  double equality_max_error = 0.0;  // max |lhs - rhs| / (1 + |Phi(c)|) at constant f
};

/// Randomized Jensen runs: random normalized discrete measures with 2..max_atoms
/// atoms, random piecewise-linear convex Phi, random f into dom Phi. Each
/// trial also checks the equality case f == c.
inline JensenTrialSummary run_jensen_trials(long trials, std::uint64_t seed, int max_atoms = 16) {
  std::mt19937_64 rng(seed);
  JensenTrialSummary out;
  for (long n = 0; n < trials; ++n) {
    const ConvexFunction phi = random_pwl_convex(rng);
    const double lo = phi.domain().lo().value(), hi = phi.domain().hi().value();
    const int m = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_atoms - 1));
    std::vector<double> pts(m), w(m), fx(m);
    for (int i = 0; i < m; ++i) {
      pts[i] = i;
      w[i] = unit_uniform(rng);
      fx[i] = uniform_in(rng, lo, hi);
    }
    const MeasureSpace ms = MeasureSpace::discrete(pts, w).normalized();
    const auto rep = jensen(ms, [&](std::span<const double> x) { return fx[static_cast<std::size_t>(x[0])]; }, phi);
    const double rel = rep.slack / (1.0 + std::abs(rep.rhs));
    out.worst_relative_slack = std::min(out.worst_relative_slack, rel);
    if (rep.slack < -1e-9 * (1.0 + std::abs(rep.rhs))) ++out.violations;
    ++out.trials;

    const double c = uniform_in(rng, lo, hi);
    const auto eq = jensen(ms, [c](std::span<const double>) { return c; }, phi);
    out.equality_max_error = std::max(out.equality_max_error, std::abs(eq.lhs - eq.rhs) / (1.0 + std::abs(phi.eval(c))));
    ++out.equality_trials;
  }
  return out;
}

/// Random point of an interval (open ends avoided); unbounded ends use a
/// heavy-tailed map so that large magnitudes are represented.
inline double random_in_interval(std::mt19937_64& rng, const Interval& iv) {
  if (iv.is_point()) return iv.lo().value();
  const double u = unit_uniform(rng);
  const bool lo_fin = iv.lo().is_finite(), hi_fin = iv.hi().is_finite();
  if (lo_fin && hi_fin) return iv.lo().value() + u * (iv.hi().value() - iv.lo().value());
  if (lo_fin) return iv.lo().value() + std::expm1(20.0 * u) * 1e-4;
  if (hi_fin) return iv.hi().value() - std::expm1(20.0 * u) * 1e-4;
  return std::sinh(40.0 * (u - 0.5));
}

struct SupInverseCheck {
  long pairs = 0;
  long monotone_violations = 0;
  long concavity_violations = 0;
  long roundtrip_checked = 0;
  double roundtrip_max_error = 0.0;  // max |si(Phi(t)) - t| / (1 + |t|)
  bool ok() const { return monotone_violations == 0 && concavity_violations == 0 && roundtrip_max_error <= 1e-10; }
};

/// Monotonicity on random pairs, midpoint concavity on random triples and the
/// round trip si(Phi(t)) = t for t right of t_max (all t when strict).
/// Roundtrip is skipped for constant Phi.
inline SupInverseCheck check_sup_inverse(const SupInverse& si, long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SupInverseCheck out;
  const Interval& im = si.domain();
  for (long k = 0; k < samples; ++k) {
    double y1 = random_in_interval(rng, im), y2 = random_in_interval(rng, im);
    if (y1 > y2) std::swap(y1, y2);
    const double s1 = si.eval(y1), s2 = si.eval(y2);
    const double tol = 1e-12 * (1.0 + std::abs(s1) + std::abs(s2));
    if (s1 > s2 + tol || (si.strict() && y1 < y2 && !(s1 < s2))) ++out.monotone_violations;
    const double ym = 0.5 * (y1 + y2);
    if (si.eval(ym) < 0.5 * (s1 + s2) - tol) ++out.concavity_violations;
    ++out.pairs;
  }
  if (si.kind() == ConditionCase::Constant) return out;
  const Interval& dom = si.phi().domain();
  const double from = si.t_max() ? *si.t_max() : (dom.lo().is_finite() ? dom.lo().value() : -30.0);
  const double to = dom.hi().is_finite() ? dom.hi().value() : from + 30.0;
  for (long k = 0; k < samples; ++k) {
    const double t = from + (to - from) * unit_uniform(rng);
    if (!dom.contains(t)) continue;
    const double y = si.phi().eval(t);
    if (!si.accepts(y)) continue;
    out.roundtrip_max_error = std::max(out.roundtrip_max_error, std::abs(si.eval(y) - t) / (1.0 + std::abs(t)));
    ++out.roundtrip_checked;
  }
  return out;
}

}  // namespace jbound
