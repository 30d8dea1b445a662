#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "convex.hpp"
#include "error.hpp"
#include "quadrature.hpp"

namespace jbound {

using Complex = std::complex<double>;
using CPoint = std::vector<Complex>;
using CSpan = std::span<const Complex>;

/// Value below which ln|f| is clamped before a convex function is applied.
inline constexpr double kLogFloor = -1e9;

// ---------------------------------------------------------------------------
// Domains

struct FullSpace {
  int n;
};
struct BallDomain {
  CPoint center;
  double radius;
};
/// Upper half-plane {Im z > 0} in C.
struct HalfPlane {};
struct Polydisc {
  CPoint center;
  std::vector<double> radii;
};

class Domain {
 public:
  using Kind = std::variant<FullSpace, BallDomain, HalfPlane, Polydisc>;

  static Domain full_space(int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
    return Domain(FullSpace{n});
  }
  static Domain ball(CPoint center, double radius) {
    if (center.empty() || !(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball domain needs a center and radius > 0");
    return Domain(BallDomain{std::move(center), radius});
  }
  static Domain half_plane() { return Domain(HalfPlane{}); }
  static Domain polydisc(CPoint center, std::vector<double> radii) {
    if (center.empty() || center.size() != radii.size())
      throw Error(ErrorKind::InvalidArgument, "polydisc needs one radius per coordinate");
    for (double r : radii)
      if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "polydisc radii must be > 0");
    return Domain(Polydisc{std::move(center), std::move(radii)});
  }

  const Kind& kind() const { return kind_; }

  int dim() const {
    return std::visit(
        [](const auto& d) -> int {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, FullSpace>) {
            return d.n;
          } else if constexpr (std::is_same_v<D, HalfPlane>) {
            return 1;
          } else {
            return static_cast<int>(d.center.size());
          }
        },
        kind_);
  }

  /// Euclidean distance from z to the complement; 0 outside, +inf for C^n.
  double dist_to_complement(CSpan z) const {
    if (static_cast<int>(z.size()) != dim()) throw Error(ErrorKind::InvalidArgument, "point dimension mismatch");
    return std::visit(
        [z](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, FullSpace>) {
            return std::numeric_limits<double>::infinity();
          } else if constexpr (std::is_same_v<D, BallDomain>) {
            double s = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) s += std::norm(z[i] - d.center[i]);
            return std::max(0.0, d.radius - std::sqrt(s));
          } else if constexpr (std::is_same_v<D, HalfPlane>) {
            return std::max(0.0, z[0].imag());
          } else {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < z.size(); ++i) best = std::min(best, d.radii[i] - std::abs(z[i] - d.center[i]));
            return std::max(0.0, best);
          }
        },
        kind_);
  }

  bool contains(CSpan z) const { return dist_to_complement(z) > 0.0; }

 private:
  explicit Domain(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Weights

struct AbsSqRule {};
struct ImPartRule {};
struct ConstantWeightRule {
  double c;
};
struct RealMonomial {
  double coef;
  std::vector<int> powers;  // exponents of x1, y1, x2, y2, ...
};
struct RealPolyRule {
  std::vector<RealMonomial> terms;
};
struct Log1pAbsSqRule {};
/// Samples on a regular grid over [x0, x1] x [y0, y1] (n = 1), bilinear in
/// between; values row-major with x fastest.
struct GridRule {
  double x0, x1, y0, y1;
  int nx, ny;
  std::vector<double> values;
};

using WeightRule = std::variant<AbsSqRule, ImPartRule, ConstantWeightRule, RealPolyRule, Log1pAbsSqRule, GridRule>;

struct WeightTerm {
  double coef;
  WeightRule rule;
};

/// A weight function on C^n, stored as a linear combination of basic rules.
class Weight {
 public:
  Weight() = default;
  explicit Weight(WeightRule rule, double coef = 1.0) { terms_.push_back({coef, std::move(rule)}); }

  static Weight abs_sq() { return Weight(AbsSqRule{}); }
  static Weight im_part() { return Weight(ImPartRule{}); }
  static Weight constant(double c) { return Weight(ConstantWeightRule{c}); }
  static Weight real_poly(std::vector<RealMonomial> terms) { return Weight(RealPolyRule{std::move(terms)}); }
  static Weight log1p_abs_sq() { return Weight(Log1pAbsSqRule{}); }
  static Weight grid(GridRule g) {
    if (g.nx < 2 || g.ny < 2 || g.values.size() != static_cast<std::size_t>(g.nx) * g.ny || !(g.x0 < g.x1) ||
        !(g.y0 < g.y1))
      throw Error(ErrorKind::InvalidArgument, "grid weight needs nx, ny >= 2 and nx*ny values");
    return Weight(std::move(g));
  }

  const std::vector<WeightTerm>& terms() const { return terms_; }

  Weight scaled(double c) const {
    Weight out = *this;
    for (auto& t : out.terms_) t.coef *= c;
    return out;
  }

  friend Weight operator+(Weight a, const Weight& b) {
    a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
    return a;
  }

  double operator()(CSpan z) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef * eval_rule(t.rule, z);
    return s;
  }

 private:
  static double eval_rule(const WeightRule& rule, CSpan z) {
    return std::visit(
        [z](const auto& r) -> double {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, AbsSqRule>) {
            double s = 0.0;
            for (const auto& c : z) s += std::norm(c);
            return s;
          } else if constexpr (std::is_same_v<R, ImPartRule>) {
            if (z.size() != 1) throw Error(ErrorKind::InvalidArgument, "Im z weight is defined for n = 1 only");
            return z[0].imag();
          } else if constexpr (std::is_same_v<R, ConstantWeightRule>) {
            return r.c;
          } else if constexpr (std::is_same_v<R, RealPolyRule>) {
            double s = 0.0;
            for (const auto& m : r.terms) {
              if (m.powers.size() > 2 * z.size())
                throw Error(ErrorKind::InvalidArgument, "polynomial weight has more variables than 2n");
              double term = m.coef;
              for (std::size_t k = 0; k < m.powers.size(); ++k) {
                const double x = (k % 2 == 0) ? z[k / 2].real() : z[k / 2].imag();
                for (int e = 0; e < m.powers[k]; ++e) term *= x;
              }
              s += term;
            }
            return s;
          } else if constexpr (std::is_same_v<R, Log1pAbsSqRule>) {
            double s = 0.0;
            for (const auto& c : z) s += std::norm(c);
            return std::log1p(s);
          } else {
            if (z.size() != 1) throw Error(ErrorKind::InvalidArgument, "grid weight is defined for n = 1 only");
            const double fx = (z[0].real() - r.x0) / (r.x1 - r.x0) * (r.nx - 1);
            const double fy = (z[0].imag() - r.y0) / (r.y1 - r.y0) * (r.ny - 1);
            if (!(fx >= 0.0 && fx <= r.nx - 1 && fy >= 0.0 && fy <= r.ny - 1))
              throw Error(ErrorKind::DomainError, "grid weight evaluated outside its sample grid");
            const int ix = std::min(static_cast<int>(fx), r.nx - 2);
            const int iy = std::min(static_cast<int>(fy), r.ny - 2);
            const double ax = fx - ix, ay = fy - iy;
            auto at = [&](int i, int j) { return r.values[static_cast<std::size_t>(j) * r.nx + i]; };
            return (1 - ax) * (1 - ay) * at(ix, iy) + ax * (1 - ay) * at(ix + 1, iy) + (1 - ax) * ay * at(ix, iy + 1) +
                   ax * ay * at(ix + 1, iy + 1);
          }
        },
        rule);
  }

  std::vector<WeightTerm> terms_;
};

// ---------------------------------------------------------------------------
// Holomorphic test functions

struct PolyRule {
  std::vector<Complex> coeffs;  // c0 + c1 z + c2 z^2 + ...
};
struct ExpPolyRule {
  std::vector<Complex> coeffs;  // exp(q(z)), q as in PolyRule
};
struct MultiTerm {
  Complex coef;
  std::vector<int> powers;  // one exponent per coordinate
};
struct MultiPolyRule {
  int n;
  std::vector<MultiTerm> terms;
};

class HoloFunction {
 public:
  using Rule = std::variant<PolyRule, ExpPolyRule, MultiPolyRule>;

  static HoloFunction poly(std::vector<Complex> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    return HoloFunction(PolyRule{std::move(coeffs)});
  }
  static HoloFunction exp_poly(std::vector<Complex> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    return HoloFunction(ExpPolyRule{std::move(coeffs)});
  }
  static HoloFunction multi_poly(int n, std::vector<MultiTerm> terms) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
    for (const auto& t : terms)
      if (static_cast<int>(t.powers.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "multi-index length must equal n");
    return HoloFunction(MultiPolyRule{n, std::move(terms)});
  }

  const Rule& rule() const { return rule_; }

  int dim() const {
    if (const auto* m = std::get_if<MultiPolyRule>(&rule_)) return m->n;
    return 1;
  }

  Complex value(CSpan z) const {
    check(z);
    return std::visit(
        [z](const auto& r) -> Complex {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, PolyRule>) {
            return horner(r.coeffs, z[0]);
          } else if constexpr (std::is_same_v<R, ExpPolyRule>) {
            return std::exp(horner(r.coeffs, z[0]));
          } else {
            Complex s = 0.0;
            for (const auto& t : r.terms) {
              Complex term = t.coef;
              for (std::size_t k = 0; k < z.size(); ++k)
                for (int e = 0; e < t.powers[k]; ++e) term *= z[k];
              s += term;
            }
            return s;
          }
        },
        rule_);
  }

  /// ln|f(z)|, -inf at zeros; exact (overflow-free) for exp-polynomials.
  double log_abs(CSpan z) const {
    if (const auto* e = std::get_if<ExpPolyRule>(&rule_)) {
      check(z);
      return horner(e->coeffs, z[0]).real();
    }
    const double a = std::abs(value(z));
    return a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a);
  }

 private:
  explicit HoloFunction(Rule r) : rule_(std::move(r)) {}

  void check(CSpan z) const {
    if (static_cast<int>(z.size()) != dim()) throw Error(ErrorKind::InvalidArgument, "point dimension mismatch");
  }

  static Complex horner(const std::vector<Complex>& c, Complex z) {
    Complex s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
    return s;
  }

  Rule rule_;
};

// ---------------------------------------------------------------------------
// Ball and sphere averages

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Lebesgue volume of a ball of radius r in C^n: pi^n r^(2n) / n!.
inline double ball_volume(int n, double r) {
  if (n < 1 || !(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball_volume needs n >= 1 and r > 0");
  return std::pow(std::numbers::pi, n) * std::pow(r, 2 * n) / factorial(n);
}

namespace detail {

// Node value policy: -inf clamps to the log floor, NaN and +inf are failures.
inline double clip_node_value(double v) {
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
    throw Error(ErrorKind::QuadratureFailure, "non-finite integrand value at a quadrature node");
  return std::max(v, kLogFloor);
}

template <class Fn>
double apply_at(const Fn& fn, CPoint& scratch) {
  return static_cast<double>(fn(CSpan(scratch)));
}

}  // namespace detail

/// Average of fn over the ball B(z, r). Polar Gauss-Legendre for n = 1,
/// seeded Monte Carlo in R^(2n) otherwise.
template <class Fn>
double ball_mean(const Fn& fn, CSpan z, double r, const QuadratureSpec& q) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "ball radius must be finite and > 0");
  const std::size_t n = z.size();
  CPoint pt(z.begin(), z.end());
  CompensatedSum s;
  if (q.kind == QuadratureKind::PolarGauss) {
    if (n != 1) throw Error(ErrorKind::InvalidArgument, "polar-gauss ball means need n = 1; use Monte Carlo");
    const PlanarRule& rule = unit_disc_mean_rule(q.radial_order, q.angular_order);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      pt[0] = z[0] + Complex(r * rule.x[i], r * rule.y[i]);
      s += rule.w[i] * detail::clip_node_value(detail::apply_at(fn, pt));
    }
    return s.value();
  }
  const auto& cloud = unit_ball_cloud(static_cast<int>(2 * n), q.mc_count, q.seed);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* c = &cloud.coords[i * 2 * n];
    for (std::size_t k = 0; k < n; ++k) pt[k] = z[k] + Complex(r * c[2 * k], r * c[2 * k + 1]);
    s += detail::clip_node_value(detail::apply_at(fn, pt));
  }
  return s.value() / static_cast<double>(cloud.size());
}

/// Normalized average of fn over the sphere |z' - z| = r.
template <class Fn>
double sphere_mean(const Fn& fn, CSpan z, double r, const QuadratureSpec& q) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "sphere radius must be finite and > 0");
  const std::size_t n = z.size();
  CPoint pt(z.begin(), z.end());
  CompensatedSum s;
  if (q.kind == QuadratureKind::PolarGauss) {
    if (n != 1) throw Error(ErrorKind::InvalidArgument, "polar-gauss sphere means need n = 1; use Monte Carlo");
    const PlanarRule& rule = unit_circle_mean_rule(q.angular_order);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      pt[0] = z[0] + Complex(r * rule.x[i], r * rule.y[i]);
      s += rule.w[i] * detail::clip_node_value(detail::apply_at(fn, pt));
    }
    return s.value();
  }
  const auto& cloud = unit_ball_cloud(static_cast<int>(2 * n), q.mc_count, q.seed, true);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* c = &cloud.coords[i * 2 * n];
    for (std::size_t k = 0; k < n; ++k) pt[k] = z[k] + Complex(r * c[2 * k], r * c[2 * k + 1]);
    s += detail::clip_node_value(detail::apply_at(fn, pt));
  }
  return s.value() / static_cast<double>(cloud.size());
}

/// Surface area of the unit sphere in C^n = R^(2n): 2 pi^n / (n-1)!.
inline double unit_sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, n) / factorial(n - 1); }

/// The sphere-mean prefactor written as (n-1)! / (2 pi^n max{1, 2(n-1)} r^(2n-1)),
/// applied to the integral over the unit sphere. It differs from the
/// normalized average (n-1)! / (2 pi^n) by the factor returned by
/// literal_sphere_factor_ratio; sphere_mean uses the normalized average.
inline double literal_sphere_prefactor(int n, double r) {
  return factorial(n - 1) / (2.0 * std::pow(std::numbers::pi, n) * std::max(1.0, 2.0 * (n - 1)) * std::pow(r, 2 * n - 1));
}

inline double literal_sphere_factor_ratio(int n, double r) { return literal_sphere_prefactor(n, r) * unit_sphere_area(n); }

/// Largest value of fn over B(z, r), estimated on the ball quadrature nodes
/// plus a boundary layer (4 * angular_order equispaced angles for n = 1).
template <class Fn>
double ball_sup(const Fn& fn, CSpan z, double r, const QuadratureSpec& q) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be > 0");
  const std::size_t n = z.size();
  CPoint pt(z.begin(), z.end());
  double best = -std::numeric_limits<double>::infinity();
  auto visit = [&] { best = std::max(best, detail::clip_node_value(detail::apply_at(fn, pt))); };
  if (q.kind == QuadratureKind::PolarGauss) {
    if (n != 1) throw Error(ErrorKind::InvalidArgument, "polar-gauss ball sup needs n = 1; use Monte Carlo");
    const PlanarRule& rule = unit_disc_mean_rule(q.radial_order, q.angular_order);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      pt[0] = z[0] + Complex(r * rule.x[i], r * rule.y[i]);
      visit();
    }
    const int m = 4 * q.angular_order;
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * std::numbers::pi * k / m;
      pt[0] = z[0] + std::polar(r, th);
      visit();
    }
    return best;
  }
  for (bool sphere : {false, true}) {
    const auto& cloud = unit_ball_cloud(static_cast<int>(2 * n), q.mc_count, q.seed, sphere);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double* c = &cloud.coords[i * 2 * n];
      for (std::size_t k = 0; k < n; ++k) pt[k] = z[k] + Complex(r * c[2 * k], r * c[2 * k + 1]);
      visit();
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Integrals over domains

namespace detail {

inline constexpr double kShellRelTol = 1e-10;
inline constexpr double kMaxTruncationRadius = 1e3;

// Composite radial Gauss-Legendre segments [0,1], [1,2], [2,4], ..., [R/2, R].
inline std::vector<std::pair<double, double>> dyadic_segments(double radius) {
  std::vector<std::pair<double, double>> segs;
  double a = 0.0, b = std::min(1.0, radius);
  while (a < radius) {
    segs.emplace_back(a, b);
    a = b;
    b = std::min(2.0 * b, radius);
  }
  return segs;
}

// Product-of-discs rule over a polydisc (per-coordinate polar rules).
template <class Fn>
double integrate_polydisc(const Fn& integrand, const CPoint& center, const std::vector<std::vector<PlanarRule>>& coord_rules) {
  const std::size_t n = center.size();
  std::vector<const PlanarRule*> flat_rules;
  // Flatten each coordinate's composite rule into one list.
  std::vector<PlanarRule> merged(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& r : coord_rules[k]) {
      merged[k].x.insert(merged[k].x.end(), r.x.begin(), r.x.end());
      merged[k].y.insert(merged[k].y.end(), r.y.begin(), r.y.end());
      merged[k].w.insert(merged[k].w.end(), r.w.begin(), r.w.end());
    }
  }
  CPoint pt(center);
  std::vector<std::size_t> idx(n, 0);
  CompensatedSum s;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      pt[k] = center[k] + Complex(merged[k].x[idx[k]], merged[k].y[idx[k]]);
      w *= merged[k].w[idx[k]];
    }
    const double v = static_cast<double>(integrand(CSpan(pt)));
    if (std::isnan(v) || std::isinf(v)) throw Error(ErrorKind::Divergent, "integrand is not finite");
    s += w * v;
    std::size_t k = 0;
    while (k < n && ++idx[k] == merged[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
  return s.value();
}

template <class Fn>
double integrate_planar(const Fn& integrand, Complex center, const PlanarRule& rule) {
  CPoint pt(1);
  CompensatedSum s;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    pt[0] = center + Complex(rule.x[i], rule.y[i]);
    const double v = static_cast<double>(integrand(CSpan(pt)));
    if (std::isnan(v) || std::isinf(v)) throw Error(ErrorKind::Divergent, "integrand is not finite");
    s += rule.w[i] * v;
  }
  return s.value();
}

}  // namespace detail

/// Integral of a real integrand over a domain with Lebesgue measure.
/// Unbounded domains are truncated to growing regions until the newest
/// layer adds less than 1e-10 of the total; failing that by radius 1e3 the
/// integral is reported Divergent.
template <class Fn>
double integrate_domain(const Fn& integrand, const Domain& dom, const QuadratureSpec& q) {
  return std::visit(
      [&](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, BallDomain>) {
          const std::size_t n = d.center.size();
          if (n == 1 && q.kind == QuadratureKind::PolarGauss)
            return detail::integrate_planar(integrand, d.center[0], annulus_rule(0.0, d.radius, q.radial_order, q.angular_order));
          if (q.kind != QuadratureKind::MonteCarlo)
            throw Error(ErrorKind::InvalidArgument, "balls in C^n, n >= 2, need Monte Carlo quadrature");
          const double mean = ball_mean(
              [&](CSpan z) {
                const double v = static_cast<double>(integrand(z));
                if (std::isnan(v) || std::isinf(v)) throw Error(ErrorKind::Divergent, "integrand is not finite");
                return v;
              },
              d.center, d.radius, q);
          return mean * ball_volume(static_cast<int>(n), d.radius);
        } else if constexpr (std::is_same_v<D, Polydisc>) {
          if (q.kind != QuadratureKind::PolarGauss) throw Error(ErrorKind::InvalidArgument, "polydiscs use polar-gauss quadrature");
          std::vector<std::vector<PlanarRule>> rules(d.center.size());
          for (std::size_t k = 0; k < d.center.size(); ++k)
            rules[k].push_back(annulus_rule(0.0, d.radii[k], q.radial_order, q.angular_order));
          return detail::integrate_polydisc(integrand, d.center, rules);
        } else if constexpr (std::is_same_v<D, FullSpace>) {
          if (q.kind != QuadratureKind::PolarGauss) throw Error(ErrorKind::InvalidArgument, "C^n integrals use polar-gauss quadrature");
          if (d.n == 1) {
            CompensatedSum total;
            double r0 = 0.0, r1 = 1.0;
            while (true) {
              const double shell =
                  detail::integrate_planar(integrand, 0.0, annulus_rule(r0, r1, q.radial_order, q.angular_order));
              total += shell;
              const double t = total.value();
              if (std::isinf(t)) throw Error(ErrorKind::Divergent, "truncated integral overflowed");
              if (r1 >= 4.0 && std::abs(shell) <= detail::kShellRelTol * std::abs(t)) return t;
              if (r1 > detail::kMaxTruncationRadius)
                throw Error(ErrorKind::Divergent, "no convergence up to radius " + std::to_string(r1));
              r0 = r1;
              r1 *= 2.0;
            }
          }
          // n >= 2: product of per-coordinate dyadic discs, reduced orders.
          const int radial = std::min(q.radial_order, 16);
          const int angular = std::min(q.angular_order, 32);
          double prev = 0.0;
          for (double radius = 1.0;; radius *= 2.0) {
            std::vector<std::vector<PlanarRule>> rules(d.n);
            for (int k = 0; k < d.n; ++k)
              for (const auto& [a, b] : detail::dyadic_segments(radius)) rules[k].push_back(annulus_rule(a, b, radial, angular));
            const double cur = detail::integrate_polydisc(integrand, CPoint(d.n, 0.0), rules);
            if (std::isinf(cur)) throw Error(ErrorKind::Divergent, "truncated integral overflowed");
            if (radius >= 4.0 && std::abs(cur - prev) <= detail::kShellRelTol * std::abs(cur)) return cur;
            if (radius > detail::kMaxTruncationRadius)
              throw Error(ErrorKind::Divergent, "no convergence up to radius " + std::to_string(radius));
            prev = cur;
          }
        } else {
          // Upper half-plane: boxes [-X, X] x (0, X] with dyadic composite
          // Gauss-Legendre in each direction.
          if (q.kind != QuadratureKind::PolarGauss) throw Error(ErrorKind::InvalidArgument, "half-plane integrals use polar-gauss quadrature");
          const auto& g = gauss_legendre(q.radial_order);
          double prev = 0.0;
          for (double extent = 1.0;; extent *= 2.0) {
            const auto ysegs = detail::dyadic_segments(extent);
            std::vector<std::pair<double, double>> xsegs;
            for (auto it = ysegs.rbegin(); it != ysegs.rend(); ++it) xsegs.emplace_back(-it->second, -it->first);
            xsegs.insert(xsegs.end(), ysegs.begin(), ysegs.end());
            CPoint pt(1);
            CompensatedSum s;
            for (const auto& [ya, yb] : ysegs) {
              const double hy = 0.5 * (yb - ya);
              for (const auto& [xa, xb] : xsegs) {
                const double hx = 0.5 * (xb - xa);
                for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                  const double y = ya + hy * (g.nodes[i] + 1.0);
                  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
                    pt[0] = Complex(xa + hx * (g.nodes[j] + 1.0), y);
                    const double v = static_cast<double>(integrand(CSpan(pt)));
                    if (std::isnan(v) || std::isinf(v)) throw Error(ErrorKind::Divergent, "integrand is not finite");
                    s += hy * g.weights[i] * hx * g.weights[j] * v;
                  }
                }
              }
            }
            const double cur = s.value();
            if (extent >= 4.0 && std::abs(cur - prev) <= detail::kShellRelTol * std::abs(cur)) return cur;
            if (extent > detail::kMaxTruncationRadius)
              throw Error(ErrorKind::Divergent, "no convergence up to extent " + std::to_string(extent));
            prev = cur;
          }
        }
      },
      dom.kind());
}

/// ||f||_w = (int |f|^p e^(-w) dlambda)^(1/p) over the domain.
inline double weighted_norm(const HoloFunction& f, double p, const Weight& w, const Domain& dom, const QuadratureSpec& q) {
  if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "norm exponent p must be > 0");
  if (f.dim() != dom.dim()) throw Error(ErrorKind::InvalidArgument, "function and domain dimensions differ");
  const double integral = integrate_domain(
      [&](CSpan z) {
        const double lf = f.log_abs(z);
        if (lf == -std::numeric_limits<double>::infinity()) return 0.0;
        return std::exp(p * lf - w(z));
      },
      dom, q);
  return std::pow(integral, 1.0 / p);
}

/// N_Phi(f; v) = int Phi(ln|f| - v) dlambda. The exponential rule uses
/// exp(-inf) = 0 at zeros of f; other rules see ln|f| clamped to -1e9.
inline double n_phi(const HoloFunction& f, const Weight& v, const ConvexFunction& phi, const Domain& dom,
                    const QuadratureSpec& q) {
  if (f.dim() != dom.dim()) throw Error(ErrorKind::InvalidArgument, "function and domain dimensions differ");
  const auto* exp_rule = std::get_if<ExponentialRule>(&phi.rule());
  const Interval& idom = phi.domain();
  return integrate_domain(
      [&](CSpan z) {
        double lf = f.log_abs(z);
        if (exp_rule && idom == Interval::real_line()) {
          if (lf == -std::numeric_limits<double>::infinity()) return 0.0;
          return std::exp(exp_rule->p * (lf - v(z)));
        }
        lf = std::max(lf, kLogFloor);
        const double t = lf - v(z);
        if (!idom.contains(t))
          throw Error(ErrorKind::DomainViolation, "ln|f| - v = " + std::to_string(t) + " outside " + idom.to_string());
        return phi.eval(t);
      },
      dom, q);
}

inline CPoint make_point(double re, double im) { return CPoint{Complex(re, im)}; }

}  // namespace jbound
