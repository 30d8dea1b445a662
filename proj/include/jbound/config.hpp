#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "convex.hpp"
#include "dbar.hpp"
#include "error.hpp"
#include "geom.hpp"
#include "interval.hpp"
#include "quadrature.hpp"

namespace jbound::config {

using nlohmann::json;

/// A JSON value with its dotted path, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const { throw Error::config(path_.empty() ? "<root>" : path_, msg); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end()) Node(*j_, sub(key)).fail("missing required field");
    return Node(*it, sub(key));
  }

  Node at(std::size_t i) const { return Node((*j_)[i], path_ + "[" + std::to_string(i) + "]"); }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  double number() const {
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_string()) {
      const auto s = j_->get<std::string>();
      if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    fail("expected a number");
  }

  double finite_number() const {
    const double x = number();
    if (!std::isfinite(x)) fail("expected a finite number");
    return x;
  }

  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long long>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  /// A number, or [re, im].
  Complex complex() const {
    if (j_->is_number()) return {finite_number(), 0.0};
    if (j_->is_array() && j_->size() == 2) return {at(0).finite_number(), at(1).finite_number()};
    fail("expected a number or [re, im]");
  }

  double number_or(const std::string& key, double dflt) const { return has(key) ? at(key).finite_number() : dflt; }
  long long integer_or(const std::string& key, long long dflt) const { return has(key) ? at(key).integer() : dflt; }
  std::string string_or(const std::string& key, const std::string& dflt) const { return has(key) ? at(key).string() : dflt; }
  bool boolean_or(const std::string& key, bool dflt) const { return has(key) ? at(key).boolean() : dflt; }

 private:
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json* j_;
  std::string path_;
};

/// Runs `make`, re-raising library argument errors as config errors at `n`.
template <class F>
auto build(const Node& n, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    n.fail(e.what());
  }
}

inline json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error::config("<root>", std::string("malformed JSON: ") + e.what());
  }
}

/// A point in C^n: [c1, c2, ...] with each c a number or [re, im]; a bare
/// number or [re, im] is a point of C.
inline CPoint point(const Node& n) {
  const json& j = n.raw();
  if (j.is_number()) return {n.complex()};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {n.complex()};
  CPoint p;
  for (std::size_t i = 0; i < n.size(); ++i) p.push_back(n.at(i).complex());
  if (p.empty()) n.fail("point needs at least one coordinate");
  return p;
}

inline Interval interval(const Node& n) {
  const double lo = n.has("lo") ? n.at("lo").number() : -std::numeric_limits<double>::infinity();
  const double hi = n.has("hi") ? n.at("hi").number() : std::numeric_limits<double>::infinity();
  const bool lc = n.boolean_or("lo_closed", std::isfinite(lo));
  const bool hc = n.boolean_or("hi_closed", std::isfinite(hi));
  return build(n, [&] { return Interval(ExtReal(lo), ExtReal(hi), lc, hc); });
}

inline std::vector<std::pair<double, double>> pairs(const Node& n) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node e = n.at(i);
    if (e.size() != 2) e.fail("expected [t, value]");
    out.emplace_back(e.at(0).finite_number(), e.at(1).finite_number());
  }
  return out;
}

/// {"rule": "power"|"exp"|"affine"|"constant"|"pwl", ...}
inline ConvexFunction convex(const Node& n) {
  const std::string rule = n.at("rule").string();
  const std::optional<Interval> dom = n.has("domain") ? std::optional<Interval>(interval(n.at("domain"))) : std::nullopt;
  const Interval line = Interval::real_line();
  if (rule == "power") {
    const double p = n.at("p").finite_number();
    if (p < 1.0) n.at("p").fail("power rule needs p >= 1");
    return build(n, [&] { return ConvexFunction::power(p, dom.value_or(line)); });
  }
  if (rule == "exp") {
    const double p = n.at("p").finite_number();
    if (!(p > 0.0)) n.at("p").fail("exp rule needs p > 0");
    return build(n, [&] { return ConvexFunction::exponential(p, dom.value_or(line)); });
  }
  if (rule == "affine") {
    const double a = n.at("a").finite_number(), b = n.number_or("b", 0.0);
    return build(n, [&] { return ConvexFunction::affine(a, b, dom.value_or(line)); });
  }
  if (rule == "constant") {
    const double c = n.at("c").finite_number();
    return build(n, [&] { return ConvexFunction::constant(c, dom.value_or(line)); });
  }
  if (rule == "pwl") {
    auto pts = pairs(n.at("points"));
    auto ovr = n.has("overrides") ? pairs(n.at("overrides")) : std::vector<std::pair<double, double>>{};
    return build(n, [&] { return ConvexFunction::piecewise_linear(std::move(pts), std::move(ovr), dom); });
  }
  n.at("rule").fail("unknown convex rule '" + rule + "'");
}

/// One weight object ({"rule": ..., "coef": c}) or an array of them (summed).
inline Weight weight(const Node& n) {
  if (n.raw().is_array()) {
    Weight sum;
    for (std::size_t i = 0; i < n.size(); ++i) sum = sum + weight(n.at(i));
    if (sum.terms().empty()) n.fail("weight sum needs at least one term");
    return sum;
  }
  const std::string rule = n.at("rule").string();
  const double coef = n.number_or("coef", 1.0);
  Weight w;
  if (rule == "abs_sq") {
    w = Weight::abs_sq();
  } else if (rule == "im") {
    w = Weight::im_part();
  } else if (rule == "constant") {
    w = Weight::constant(n.at("c").finite_number());
  } else if (rule == "log1p_abs_sq") {
    w = Weight::log1p_abs_sq();
  } else if (rule == "poly") {
    // terms: [[coef, [e_x1, e_y1, e_x2, ...]], ...]
    const Node ts = n.at("terms");
    std::vector<RealMonomial> mons;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Node t = ts.at(i);
      if (t.size() != 2) t.fail("expected [coef, [exponents]]");
      RealMonomial m{t.at(0).finite_number(), {}};
      const Node ex = t.at(1);
      for (std::size_t k = 0; k < ex.size(); ++k) {
        const long long e = ex.at(k).integer();
        if (e < 0) ex.at(k).fail("exponents must be >= 0");
        m.powers.push_back(static_cast<int>(e));
      }
      mons.push_back(std::move(m));
    }
    w = Weight::real_poly(std::move(mons));
  } else if (rule == "grid") {
    GridRule g{n.at("x0").finite_number(), n.at("x1").finite_number(), n.at("y0").finite_number(),
               n.at("y1").finite_number(), static_cast<int>(n.at("nx").integer()), static_cast<int>(n.at("ny").integer()),
               {}};
    const Node vs = n.at("values");
    for (std::size_t i = 0; i < vs.size(); ++i) g.values.push_back(vs.at(i).finite_number());
    w = build(n, [&] { return Weight::grid(std::move(g)); });
  } else {
    n.at("rule").fail("unknown weight rule '" + rule + "'");
  }
  return w.scaled(coef);
}

inline std::vector<Complex> coeffs(const Node& n) {
  std::vector<Complex> c;
  for (std::size_t i = 0; i < n.size(); ++i) c.push_back(n.at(i).complex());
  return c;
}

/// {"rule": "poly"|"exp_poly", "coeffs": [...]} or
/// {"rule": "multi_poly", "n": 2, "terms": [{"coef": c, "powers": [..]}]}.
inline HoloFunction function(const Node& n) {
  const std::string rule = n.at("rule").string();
  if (rule == "poly") return HoloFunction::poly(coeffs(n.at("coeffs")));
  if (rule == "exp_poly") return HoloFunction::exp_poly(coeffs(n.at("coeffs")));
  if (rule == "multi_poly") {
    const long long dim = n.at("n").integer();
    if (dim < 1) n.at("n").fail("dimension must be >= 1");
    std::vector<MultiTerm> terms;
    const Node ts = n.at("terms");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Node t = ts.at(i);
      MultiTerm m{t.at("coef").complex(), {}};
      const Node ps = t.at("powers");
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const long long e = ps.at(k).integer();
        if (e < 0) ps.at(k).fail("exponents must be >= 0");
        m.powers.push_back(static_cast<int>(e));
      }
      terms.push_back(std::move(m));
    }
    return build(n, [&] { return HoloFunction::multi_poly(static_cast<int>(dim), std::move(terms)); });
  }
  n.at("rule").fail("unknown function rule '" + rule + "'");
}

/// {"type": "full", "n": 1} | {"type": "ball", "center": p, "radius": r} |
/// {"type": "half_plane"} | {"type": "polydisc", "center": p, "radii": [..]}
inline Domain domain(const Node& n) {
  const std::string type = n.at("type").string();
  if (type == "full") {
    const long long dim = n.integer_or("n", 1);
    if (dim < 1) n.at("n").fail("dimension must be >= 1");
    return Domain::full_space(static_cast<int>(dim));
  }
  if (type == "ball") {
    CPoint c = point(n.at("center"));
    const double r = n.at("radius").finite_number();
    if (!(r > 0.0)) n.at("radius").fail("radius must be > 0");
    return Domain::ball(std::move(c), r);
  }
  if (type == "half_plane") return Domain::half_plane();
  if (type == "polydisc") {
    CPoint c = point(n.at("center"));
    std::vector<double> radii;
    const Node rs = n.at("radii");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double r = rs.at(i).finite_number();
      if (!(r > 0.0)) rs.at(i).fail("radius must be > 0");
      radii.push_back(r);
    }
    return build(n, [&] { return Domain::polydisc(std::move(c), std::move(radii)); });
  }
  n.at("type").fail("unknown domain type '" + type + "'");
}

/// {"kind": "polar-gauss", "radial": 64, "angular": 128} or
/// {"kind": "mc", "n": 200000, "seed": s}. A seed override replaces the
/// Monte Carlo seed.
inline QuadratureSpec quadrature(const Node& n, std::optional<std::uint64_t> seed_override) {
  const std::string kind = n.string_or("kind", "polar-gauss");
  if (kind == "polar-gauss") {
    const long long r = n.integer_or("radial", 64), a = n.integer_or("angular", 128);
    if (r < 1) n.at("radial").fail("order must be >= 1");
    if (a < 1) n.at("angular").fail("order must be >= 1");
    return QuadratureSpec::polar_gauss(static_cast<int>(r), static_cast<int>(a));
  }
  if (kind == "mc") {
    const long long count = n.integer_or("n", 200000);
    if (count < 1) n.at("n").fail("sample count must be >= 1");
    if (!n.has("seed") && !seed_override) n.fail("Monte Carlo quadrature needs a seed");
    const std::uint64_t seed = seed_override ? *seed_override : static_cast<std::uint64_t>(n.at("seed").integer());
    return QuadratureSpec::monte_carlo(static_cast<std::size_t>(count), seed);
  }
  n.at("kind").fail("unknown quadrature kind '" + kind + "'");
}

/// Either {"points": [p, ...]} or a rectangular grid of C,
/// {"re": [lo, hi, count], "im": [lo, hi, count]}.
inline std::vector<CPoint> grid(const Node& n) {
  std::vector<CPoint> out;
  if (n.has("points")) {
    const Node ps = n.at("points");
    for (std::size_t i = 0; i < ps.size(); ++i) out.push_back(point(ps.at(i)));
    return out;
  }
  auto axis = [](const Node& a) {
    if (a.size() != 3) a.fail("expected [lo, hi, count]");
    const double lo = a.at(0).finite_number(), hi = a.at(1).finite_number();
    const long long c = a.at(2).integer();
    if (c < 1) a.at(2).fail("count must be >= 1");
    std::vector<double> v;
    for (long long i = 0; i < c; ++i) v.push_back(c == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (c - 1));
    return v;
  };
  const auto re = axis(n.at("re"));
  const auto im = axis(n.at("im"));
  for (double y : im)
    for (double x : re) out.push_back({Complex(x, y)});
  return out;
}

/// {"radius": R, "terms": [{"coef": c, "z": j, "zbar": k}, ...]}
inline BumpFunction bump(const Node& n) {
  const double radius = n.at("radius").finite_number();
  if (!(radius > 0.0)) n.at("radius").fail("radius must be > 0");
  std::vector<BumpTerm> terms;
  const Node ts = n.at("terms");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Node t = ts.at(i);
    const long long j = t.integer_or("z", 0), k = t.integer_or("zbar", 0);
    if (j < 0) t.at("z").fail("power must be >= 0");
    if (k < 0) t.at("zbar").fail("power must be >= 0");
    terms.push_back({t.at("coef").complex(), static_cast<int>(j), static_cast<int>(k)});
  }
  return BumpFunction(std::move(terms), radius);
}

}  // namespace jbound::config
