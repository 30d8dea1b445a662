#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "extended.hpp"
#include "interval.hpp"

namespace jbound {

struct PowerRule {
  double p;  // t -> (t+)^p, p >= 1
};
struct ExponentialRule {
  double p;  // t -> exp(p t), p > 0
};
struct AffineRule {
  double a, b;
};
struct ConstantRule {
  double c;
};
struct PiecewiseLinearRule {
  std::vector<std::pair<double, double>> points;     // strictly increasing abscissae
  std::vector<std::pair<double, double>> overrides;  // values at closed finite ends
};

using ConvexRule = std::variant<PowerRule, ExponentialRule, AffineRule, ConstantRule, PiecewiseLinearRule>;

/// Monotone structure of a convex function on the open interior of its domain.
enum class Trend {
  Constant,
  Increasing,   // strictly increasing on (lo, hi)
  Valley,       // minimum attained, strictly increasing right of t_max
  NotIncreasing // nonincreasing near hi: no increasing right branch
};

struct InteriorShape {
  Trend trend;
  double t_max = 0.0;  // meaningful for Valley only
};

/// A convex function on an interval. Immutable once constructed; construction
/// validates convexity (for piecewise-linear input) and the endpoint rule
/// Phi(end) >= one-sided interior limit.
class ConvexFunction {
 public:
  static ConvexFunction power(double p, Interval domain = Interval::real_line()) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "power rule needs finite p >= 1");
    return ConvexFunction(PowerRule{p}, domain);
  }

  static ConvexFunction exponential(double p, Interval domain = Interval::real_line()) {
    if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "exponential rule needs finite p > 0");
    return ConvexFunction(ExponentialRule{p}, domain);
  }

  static ConvexFunction affine(double a, double b, Interval domain = Interval::real_line()) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorKind::InvalidArgument, "affine rule needs finite a, b");
    return ConvexFunction(AffineRule{a, b}, domain);
  }

  static ConvexFunction constant(double c, Interval domain = Interval::real_line()) {
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "constant rule needs finite c");
    return ConvexFunction(ConstantRule{c}, domain);
  }

  /// Piecewise-linear convex function through `points`. The default domain is
  /// the closed hull of the abscissae; a wider domain extrapolates the end
  /// slopes. Overrides may only raise the value at a closed finite end.
  static ConvexFunction piecewise_linear(std::vector<std::pair<double, double>> points,
                                         std::vector<std::pair<double, double>> overrides = {},
                                         std::optional<Interval> domain = std::nullopt) {
    if (points.size() < 2) throw Error(ErrorKind::InvalidArgument, "piecewise-linear rule needs at least two points");
    for (const auto& [t, v] : points)
      if (!std::isfinite(t) || !std::isfinite(v))
        throw Error(ErrorKind::InvalidArgument, "piecewise-linear points must be finite");
    for (std::size_t i = 1; i < points.size(); ++i)
      if (!(points[i].first > points[i - 1].first))
        throw Error(ErrorKind::InvalidArgument, "piecewise-linear abscissae must be strictly increasing");
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double slope = (points[i].second - points[i - 1].second) / (points[i].first - points[i - 1].first);
      if (slope < prev_slope - 1e-12 * (1.0 + std::abs(prev_slope)))
        throw Error(ErrorKind::InvalidArgument, "piecewise-linear input is not convex (slopes must be nondecreasing)");
      prev_slope = std::max(prev_slope, slope);
    }
    const Interval dom = domain.value_or(Interval::closed(points.front().first, points.back().first));
    ConvexFunction f(PiecewiseLinearRule{std::move(points), {}}, dom);
    auto& rule = std::get<PiecewiseLinearRule>(f.rule_);
    for (const auto& [t, v] : overrides) {
      const bool at_lo = dom.lo_closed() && t == dom.lo().value();
      const bool at_hi = dom.hi_closed() && t == dom.hi().value();
      if (!at_lo && !at_hi)
        throw Error(ErrorKind::InvalidArgument, "overrides are only allowed at closed finite domain ends");
      if (!std::isfinite(v) || v < f.formula(t) - 1e-12 * (1.0 + std::abs(v)))
        throw Error(ErrorKind::InvalidArgument, "override value must be >= the one-sided interior limit");
      rule.overrides.emplace_back(t, v);
    }
    return f;
  }

  const Interval& domain() const { return domain_; }
  const ConvexRule& rule() const { return rule_; }

  /// Phi(t). Outside the domain only the exponential rule extends, with
  /// exp(-inf) = 0 and exp(+inf) = +inf at infinite domain ends.
  ExtReal operator()(ExtReal t) const {
    if (domain_.contains(t)) {
      if (const auto* pwl = std::get_if<PiecewiseLinearRule>(&rule_))
        for (const auto& [ot, ov] : pwl->overrides)
          if (t == ExtReal(ot)) return ov;
      return formula(t.value());
    }
    if (std::holds_alternative<ExponentialRule>(rule_)) {
      if (t.is_neg_inf() && domain_.lo().is_neg_inf()) return 0.0;
      if (t.is_pos_inf() && domain_.hi().is_pos_inf()) return ExtReal::pos_inf();
    }
    throw Error(ErrorKind::DomainError, "t = " + t.to_string() + " outside " + domain_.to_string());
  }

  double eval(double t) const { return (*this)(ExtReal(t)).value(); }

  /// Underlying closed-form expression on the whole real line, ignoring
  /// endpoint overrides and the domain.
  double formula(double t) const {
    return std::visit(
        [t](const auto& r) -> double {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, PowerRule>) {
            if (t <= 0.0) return 0.0;
            return r.p == 1.0 ? t : std::pow(t, r.p);
          } else if constexpr (std::is_same_v<R, ExponentialRule>) {
            return std::exp(r.p * t);
          } else if constexpr (std::is_same_v<R, AffineRule>) {
            return r.a * t + r.b;
          } else if constexpr (std::is_same_v<R, ConstantRule>) {
            return r.c;
          } else {
            return pwl_formula(r.points, t);
          }
        },
        rule_);
  }

  /// Limit of the formula as t -> +inf (upper) or t -> -inf.
  ExtReal tail_limit(bool upper) const {
    const double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [&](const auto& r) -> ExtReal {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, PowerRule>) {
            return upper ? inf : 0.0;
          } else if constexpr (std::is_same_v<R, ExponentialRule>) {
            return upper ? inf : 0.0;
          } else if constexpr (std::is_same_v<R, AffineRule>) {
            if (r.a == 0.0) return r.b;
            return (r.a > 0.0) == upper ? inf : -inf;
          } else if constexpr (std::is_same_v<R, ConstantRule>) {
            return r.c;
          } else {
            const auto& pts = r.points;
            const double s = upper ? segment_slope(pts, pts.size() - 2) : segment_slope(pts, 0);
            if (s == 0.0) return upper ? pts.back().second : pts.front().second;
            return (s > 0.0) == upper ? inf : -inf;
          }
        },
        rule_);
  }

  InteriorShape interior_shape() const {
    const double lo = domain_.lo().value();
    const double hi = domain_.hi().value();
    return std::visit(
        [&](const auto& r) -> InteriorShape {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, PowerRule>) {
            if (hi <= 0.0) return {Trend::Constant};
            if (lo >= 0.0) return {Trend::Increasing};
            return {Trend::Valley, 0.0};
          } else if constexpr (std::is_same_v<R, ExponentialRule>) {
            return {Trend::Increasing};
          } else if constexpr (std::is_same_v<R, AffineRule>) {
            if (r.a == 0.0) return {Trend::Constant};
            return {r.a > 0.0 ? Trend::Increasing : Trend::NotIncreasing};
          } else if constexpr (std::is_same_v<R, ConstantRule>) {
            return {Trend::Constant};
          } else {
            return pwl_shape(r.points, lo, hi);
          }
        },
        rule_);
  }

 private:
  ConvexFunction(ConvexRule rule, Interval domain) : rule_(std::move(rule)), domain_(domain) {}

  static double segment_slope(const std::vector<std::pair<double, double>>& pts, std::size_t i) {
    return (pts[i + 1].second - pts[i].second) / (pts[i + 1].first - pts[i].first);
  }

  static double pwl_formula(const std::vector<std::pair<double, double>>& pts, double t) {
    if (std::isinf(t)) {
      const double s = t > 0 ? segment_slope(pts, pts.size() - 2) : segment_slope(pts, 0);
      if (s == 0.0) return t > 0 ? pts.back().second : pts.front().second;
      return s * t;
    }
    auto it = std::upper_bound(pts.begin(), pts.end(), t, [](double x, const auto& p) { return x < p.first; });
    std::size_t i;
    if (it == pts.begin()) {
      i = 0;
    } else if (it == pts.end()) {
      i = pts.size() - 2;
    } else {
      i = static_cast<std::size_t>(it - pts.begin()) - 1;
    }
    if (t == pts[i].first) return pts[i].second;
    if (t == pts[i + 1].first) return pts[i + 1].second;
    return pts[i].second + segment_slope(pts, i) * (t - pts[i].first);
  }

  // Walk the linear pieces meeting (lo, hi), left to right.
  static InteriorShape pwl_shape(const std::vector<std::pair<double, double>>& pts, double lo, double hi) {
    struct Piece {
      double start, slope;
    };
    std::vector<Piece> pieces;
    const std::size_t nseg = pts.size() - 1;
    if (lo < pts.front().first) pieces.push_back({lo, segment_slope(pts, 0)});
    for (std::size_t i = 0; i < nseg; ++i) {
      const double a = std::max(lo, pts[i].first);
      const double b = std::min(hi, pts[i + 1].first);
      if (a < b) pieces.push_back({a, segment_slope(pts, i)});
    }
    if (hi > pts.back().first) pieces.push_back({std::max(lo, pts.back().first), segment_slope(pts, nseg - 1)});
    if (pieces.empty()) return {Trend::Constant};

    bool all_zero = true;
    for (const auto& piece : pieces) all_zero = all_zero && piece.slope == 0.0;
    if (all_zero) return {Trend::Constant};
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (pieces[j].slope > 0.0) {
        if (j == 0) return {Trend::Increasing};
        return {Trend::Valley, pieces[j].start};
      }
    }
    return {Trend::NotIncreasing};
  }

  ConvexRule rule_;
  Interval domain_;
};

namespace detail {

/// One-sided limit of phi at a domain end, approached from the interior.
/// Finite ends use Richardson extrapolation on a geometric approach sequence;
/// infinite ends use the rule's closed-form tail.
inline ExtReal interior_limit(const ConvexFunction& phi, bool upper) {
  const Interval& dom = phi.domain();
  const ExtReal end = upper ? dom.hi() : dom.lo();
  if (!end.is_finite()) return phi.tail_limit(upper);
  const double e = end.value();
  const double width = (dom.hi().value() - dom.lo().value());
  double delta = 1e-7 * std::max(1.0, std::abs(e));
  if (std::isfinite(width)) delta = std::min(delta, 0.25 * width);
  const double dir = upper ? -1.0 : 1.0;
  const double f0 = phi.eval(e + dir * delta);
  const double f1 = phi.eval(e + dir * 0.5 * delta);
  return 2.0 * f1 - f0;
}

inline bool near(ExtReal a, ExtReal b) {
  if (!a.is_finite() || !b.is_finite()) return a == b;
  return std::abs(a.value() - b.value()) <= 1e-9 * (1.0 + std::abs(b.value()));
}

}  // namespace detail

enum class ConditionCase { Constant, StrictlyIncreasing, BoundedBelowWithTmax, Fails };

inline std::string to_string(ConditionCase c) {
  switch (c) {
    case ConditionCase::Constant: return "Constant";
    case ConditionCase::StrictlyIncreasing: return "StrictlyIncreasing";
    case ConditionCase::BoundedBelowWithTmax: return "BoundedBelowWithTmax";
    case ConditionCase::Fails: return "Fails";
  }
  return "?";
}

/// Which of the three admissible shapes (if any) a convex function has, so
/// that its image is an interval and its sup-inverse is increasing.
struct ConditionReport {
  ConditionCase kind = ConditionCase::Fails;
  std::optional<Interval> image;
  std::optional<double> t_max;
  std::string details;
};

namespace detail {

inline ConditionReport analyze(const ConvexFunction& phi) {
  const Interval& dom = phi.domain();
  ConditionReport rep;
  if (dom.is_point()) {
    const double c = phi.eval(dom.lo().value());
    rep.kind = ConditionCase::Constant;
    rep.image = Interval::point(c);
    rep.details = "single-point domain";
    return rep;
  }

  const InteriorShape shape = phi.interior_shape();
  const ExtReal lim_lo = interior_limit(phi, false);
  const ExtReal lim_hi = interior_limit(phi, true);
  // Endpoint values; equal to the interior limits at open ends.
  const bool has_lo = dom.lo_closed(), has_hi = dom.hi_closed();
  const ExtReal val_lo = has_lo ? phi(dom.lo()) : lim_lo;
  const ExtReal val_hi = has_hi ? phi(dom.hi()) : lim_hi;

  auto fail = [&](std::string why) {
    rep.kind = ConditionCase::Fails;
    rep.image.reset();
    rep.t_max.reset();
    rep.details = std::move(why);
    return rep;
  };

  switch (shape.trend) {
    case Trend::Constant: {
      const double lo = dom.lo().is_finite() ? dom.lo().value() : -1.0;
      const double hi = dom.hi().is_finite() ? dom.hi().value() : 1.0;
      const double c = phi.formula(dom.lo().is_finite() && dom.hi().is_finite() ? 0.5 * (lo + hi)
                                   : dom.lo().is_finite()                       ? lo + 1.0
                                   : dom.hi().is_finite()                       ? hi - 1.0
                                                                                : 0.0);
      if ((has_lo && !near(val_lo, c)) || (has_hi && !near(val_hi, c)))
        return fail("constant on the interior but an endpoint value differs: image is not an interval");
      rep.kind = ConditionCase::Constant;
      rep.image = Interval::point(c);
      rep.details = "constant; sup-inverse maps the single value to sup I = " + dom.hi().to_string();
      return rep;
    }
    case Trend::Increasing: {
      if (has_lo && !near(val_lo, lim_lo))
        return fail("strictly increasing on the interior but Phi(inf I) exceeds the interior limit");
      if (has_hi && !near(val_hi, lim_hi)) return fail("strictly increasing but discontinuous at sup I");
      rep.kind = ConditionCase::StrictlyIncreasing;
      rep.image = Interval(val_lo, val_hi, dom.lo_closed(), dom.hi_closed());
      rep.details = "strictly increasing; sup-inverse is the ordinary inverse";
      return rep;
    }
    case Trend::Valley: {
      const double t_max = shape.t_max;
      const double m = phi.eval(t_max);
      if (has_hi && !near(val_hi, lim_hi))
        return fail("restriction right of t_max is discontinuous at sup I (condition i)");
      ExtReal left_sup = lim_lo;
      if (has_lo) left_sup = std::max(lim_lo, val_lo);
      const ExtReal right_top = val_hi;
      if (dom.lo_closed() && !dom.hi_closed()) {
        const bool strictly_less =
            left_sup < right_top && !(left_sup.is_finite() && right_top.is_finite() && near(left_sup, right_top));
        if (!strictly_less)
          return fail("left-end values reach the open top of the right branch (condition iii needs <)");
      } else if (!(left_sup <= right_top || near(left_sup, right_top))) {
        return fail("left-end values exceed the top of the right branch (condition ii)");
      }
      rep.kind = ConditionCase::BoundedBelowWithTmax;
      rep.image = Interval(m, right_top, true, dom.hi_closed());
      rep.t_max = t_max;
      rep.details = "bounded below, nonconstant; sup-inverse inverts the restriction to [t_max, sup I)";
      return rep;
    }
    case Trend::NotIncreasing:
      return fail("no strictly increasing right branch: sup-inverse cannot be increasing");
  }
  return fail("unreachable");
}

}  // namespace detail

/// The sup-inverse y -> sup Phi^{-1}({y}) on im Phi, for a convex Phi that
/// passes classification.
class SupInverse {
 public:
  const ConvexFunction& phi() const { return phi_; }
  const Interval& domain() const { return image_; }
  std::optional<double> t_max() const { return t_max_; }
  bool strict() const { return strict_; }
  ConditionCase kind() const { return kind_; }

  /// y in im Phi, or y = 0 for an exponential on a domain unbounded below
  /// (the exp(-inf) = 0 convention).
  bool accepts(ExtReal y) const { return image_.contains(y) || (extended_zero_ && y == ExtReal(0.0)); }

  ExtReal operator()(ExtReal y) const {
    if (!accepts(y)) throw Error(ErrorKind::DomainError, "y = " + y.to_string() + " outside im Phi " + image_.to_string());
    const Interval& dom = phi_.domain();
    if (kind_ == ConditionCase::Constant) return dom.hi();
    if (extended_zero_ && y == ExtReal(0.0)) return ExtReal::neg_inf();
    if (image_.hi_closed() && y == image_.hi()) return dom.hi();
    if (kind_ == ConditionCase::StrictlyIncreasing && image_.lo_closed() && y == image_.lo()) return dom.lo();
    if (kind_ == ConditionCase::BoundedBelowWithTmax && y == image_.lo()) return *t_max_;

    const double v = y.value();
    const double t = std::visit(
        [&](const auto& r) -> double {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, PowerRule>) {
            return r.p == 1.0 ? v : std::pow(v, 1.0 / r.p);
          } else if constexpr (std::is_same_v<R, ExponentialRule>) {
            return std::log(v) / r.p;
          } else if constexpr (std::is_same_v<R, AffineRule>) {
            return (v - r.b) / r.a;
          } else if constexpr (std::is_same_v<R, ConstantRule>) {
            return dom.hi().value();
          } else {
            return bisect(v);
          }
        },
        phi_.rule());
    return std::clamp(t, branch_lo(), dom.hi().value());
  }

  double eval(double y) const { return (*this)(ExtReal(y)).value(); }

 private:
  SupInverse(ConvexFunction phi, const ConditionReport& rep)
      : phi_(std::move(phi)), image_(*rep.image), t_max_(rep.t_max), kind_(rep.kind) {
    const Interval& dom = phi_.domain();
    strict_ = kind_ == ConditionCase::StrictlyIncreasing || (kind_ == ConditionCase::Constant && dom.is_point());
    extended_zero_ = std::holds_alternative<ExponentialRule>(phi_.rule()) && dom.lo().is_neg_inf();
  }

  double branch_lo() const {
    if (t_max_) return *t_max_;
    return phi_.domain().lo().value();
  }

  // Largest t on the strictly increasing branch with formula(t) <= y; the
  // branch is continuous, so this is the preimage of y.
  double bisect(double y) const {
    const Interval& dom = phi_.domain();
    double a = branch_lo();
    double b = dom.hi().value();
    if (std::isinf(a)) {
      a = -1.0;
      while (phi_.formula(a) > y) a *= 2.0;
    }
    if (std::isinf(b)) {
      b = std::max(1.0, a + 1.0);
      while (phi_.formula(b) < y) b = b + 2.0 * (b - a);
    }
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (phi_.formula(mid) <= y) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return std::abs(phi_.formula(b) - y) < std::abs(phi_.formula(a) - y) ? b : a;
  }

  friend ConditionReport classify(const ConvexFunction& phi);
  friend SupInverse sup_inverse(const ConvexFunction& phi);

  ConvexFunction phi_;
  Interval image_;
  std::optional<double> t_max_;
  ConditionCase kind_;
  bool strict_ = false;
  bool extended_zero_ = false;
};

namespace detail {

// Sample points of an interval, including closed ends and a spread of
// magnitudes when unbounded.
inline std::vector<double> sample_interval(const Interval& iv, int count) {
  std::vector<double> out;
  const bool lo_fin = iv.lo().is_finite();
  const bool hi_fin = iv.hi().is_finite();
  if (iv.is_point()) return {iv.lo().value()};
  for (int k = 1; k < count; ++k) {
    const double s = static_cast<double>(k) / count;  // (0, 1)
    double t;
    if (lo_fin && hi_fin) {
      t = iv.lo().value() + s * (iv.hi().value() - iv.lo().value());
    } else if (lo_fin) {
      t = iv.lo().value() + std::expm1(30.0 * s) * 1e-6;
    } else if (hi_fin) {
      t = iv.hi().value() - std::expm1(30.0 * (1.0 - s)) * 1e-6;
    } else {
      t = std::sinh(60.0 * (s - 0.5));
    }
    out.push_back(t);
  }
  if (iv.lo_closed()) out.insert(out.begin(), iv.lo().value());
  if (iv.hi_closed()) out.push_back(iv.hi().value());
  return out;
}

}  // namespace detail

/// Classifies phi into the admissible cases; a positive classification is
/// then confirmed by testing the constructed sup-inverse on samples.
inline ConditionReport classify(const ConvexFunction& phi) {
  ConditionReport rep = detail::analyze(phi);
  if (rep.kind == ConditionCase::Fails) return rep;

  const SupInverse si(phi, rep);
  const auto ys = detail::sample_interval(*rep.image, 64);
  double prev = -std::numeric_limits<double>::infinity();
  for (double y : ys) {
    if (!std::isfinite(y)) continue;
    const double t = si.eval(y);
    if (t < prev) {
      rep.details += "; constructed sup-inverse failed the monotonicity check";
      rep.kind = ConditionCase::Fails;
      rep.image.reset();
      rep.t_max.reset();
      return rep;
    }
    prev = t;
  }
  return rep;
}

inline SupInverse sup_inverse(const ConvexFunction& phi) {
  ConditionReport rep = classify(phi);
  if (rep.kind == ConditionCase::Fails) throw Error(ErrorKind::ClassificationError, rep.details);
  return SupInverse(phi, rep);
}

enum class UpperKind { Power, Log };

struct UpperConditionReport {
  bool holds = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Checks sup Phi^{-1}(y1 y2) <= psi1(y1) * psi2(y2) (Power) or
/// <= psi1(y1) + psi2(y2) (Log) on each sample; slack is rhs - lhs.
inline UpperConditionReport check_upper_condition(const SupInverse& si, const std::function<double(double)>& psi1,
                                                  const std::function<double(double)>& psi2, UpperKind kind,
                                                  std::span<const std::pair<double, double>> samples) {
  UpperConditionReport rep;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [y1, y2] = samples[i];
    if (!(y1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "upper condition samples need y1 > 0");
    const double y = y1 * y2;
    if (!si.domain().contains(y))
      throw Error(ErrorKind::DomainError, "product y1*y2 = " + std::to_string(y) + " leaves im Phi");
    const double lhs = si.eval(y);
    const double rhs = kind == UpperKind::Power ? psi1(y1) * psi2(y2) : psi1(y1) + psi2(y2);
    const double slack = rhs - lhs;
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_index = i;
    }
    if (slack < -1e-12 * (1.0 + std::abs(rhs))) rep.holds = false;
    ++rep.checked;
  }
  return rep;
}

}  // namespace jbound
