#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"

namespace jbound {

/// Real-valued function on a measure carrier (coordinates in R^d).
using ScalarFn = std::function<double(std::span<const double>)>;

struct BallRegion {
  std::vector<double> center;
  double radius;
};
struct RectRegion {
  std::vector<double> lo, hi;
};
/// {x + iy : x_lo <= x <= x_hi, 0 < y <= y_hi}, a truncation of the upper half-plane.
struct HalfPlaneBox {
  double x_lo, x_hi, y_hi;
};
/// Planar annulus r_in <= |x - center| <= r_out; arises as a ball minus a
/// concentric ball.
struct AnnulusRegion {
  std::vector<double> center;
  double r_in, r_out;
};

using Region = std::variant<BallRegion, RectRegion, HalfPlaneBox, AnnulusRegion>;

inline int region_dim(const Region& region) {
  return std::visit(
      [](const auto& r) -> int {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, BallRegion> || std::is_same_v<R, AnnulusRegion>) {
          return static_cast<int>(r.center.size());
        } else if constexpr (std::is_same_v<R, RectRegion>) {
          return static_cast<int>(r.lo.size());
        } else {
          return 2;
        }
      },
      region);
}

inline void validate_region(const Region& region) {
  std::visit(
      [](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, BallRegion>) {
          if (r.center.empty() || !(r.radius >= 0.0) || !std::isfinite(r.radius))
            throw Error(ErrorKind::InvalidArgument, "ball needs a center and a finite radius >= 0");
        } else if constexpr (std::is_same_v<R, RectRegion>) {
          if (r.lo.empty() || r.lo.size() != r.hi.size())
            throw Error(ErrorKind::InvalidArgument, "rectangle corners must have equal nonzero dimension");
          for (std::size_t i = 0; i < r.lo.size(); ++i)
            if (!(r.lo[i] <= r.hi[i])) throw Error(ErrorKind::InvalidArgument, "rectangle needs lo <= hi");
        } else if constexpr (std::is_same_v<R, HalfPlaneBox>) {
          if (!(r.x_lo <= r.x_hi) || !(r.y_hi >= 0.0))
            throw Error(ErrorKind::InvalidArgument, "half-plane box needs x_lo <= x_hi and y_hi >= 0");
        } else {
          if (r.center.size() != 2 || !(0.0 <= r.r_in && r.r_in <= r.r_out))
            throw Error(ErrorKind::InvalidArgument, "annulus must be planar with 0 <= r_in <= r_out");
        }
      },
      region);
}

inline double unit_ball_volume_real(int dim) {
  return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

inline double region_volume(const Region& region) {
  return std::visit(
      [](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, BallRegion>) {
          const int d = static_cast<int>(r.center.size());
          return unit_ball_volume_real(d) * std::pow(r.radius, d);
        } else if constexpr (std::is_same_v<R, RectRegion>) {
          double v = 1.0;
          for (std::size_t i = 0; i < r.lo.size(); ++i) v *= r.hi[i] - r.lo[i];
          return v;
        } else if constexpr (std::is_same_v<R, HalfPlaneBox>) {
          return (r.x_hi - r.x_lo) * r.y_hi;
        } else {
          return std::numbers::pi * (r.r_out * r.r_out - r.r_in * r.r_in);
        }
      },
      region);
}

inline bool region_contains(const Region& region, std::span<const double> x) {
  return std::visit(
      [x](const auto& r) -> bool {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, BallRegion>) {
          double d2 = 0.0;
          for (std::size_t i = 0; i < r.center.size(); ++i) d2 += (x[i] - r.center[i]) * (x[i] - r.center[i]);
          return d2 < r.radius * r.radius;
        } else if constexpr (std::is_same_v<R, RectRegion>) {
          for (std::size_t i = 0; i < r.lo.size(); ++i)
            if (x[i] < r.lo[i] || x[i] > r.hi[i]) return false;
          return true;
        } else if constexpr (std::is_same_v<R, HalfPlaneBox>) {
          return x[0] >= r.x_lo && x[0] <= r.x_hi && x[1] > 0.0 && x[1] <= r.y_hi;
        } else {
          const double d2 = (x[0] - r.center[0]) * (x[0] - r.center[0]) + (x[1] - r.center[1]) * (x[1] - r.center[1]);
          return d2 >= r.r_in * r.r_in && d2 <= r.r_out * r.r_out;
        }
      },
      region);
}

/// Weighted point set in R^dim, coordinates row-major.
struct NodeSet {
  int dim = 1;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  void push(std::span<const double> x, double w) {
    coords.insert(coords.end(), x.begin(), x.end());
    weights.push_back(w);
  }
};

namespace detail {

inline NodeSet tensor_gauss_box(const std::vector<double>& lo, const std::vector<double>& hi, int order) {
  const int d = static_cast<int>(lo.size());
  const auto& g = gauss_legendre(order);
  NodeSet ns;
  ns.dim = d;
  std::vector<int> idx(d, 0);
  std::vector<double> x(d);
  while (true) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const double half = 0.5 * (hi[k] - lo[k]);
      x[k] = lo[k] + half * (g.nodes[idx[k]] + 1.0);
      w *= half * g.weights[idx[k]];
    }
    ns.push(x, w);
    int k = 0;
    while (k < d && ++idx[k] == order) idx[k++] = 0;
    if (k == d) break;
  }
  return ns;
}

inline NodeSet monte_carlo_box(const std::vector<double>& lo, const std::vector<double>& hi, std::size_t count,
                               std::uint64_t seed) {
  const int d = static_cast<int>(lo.size());
  NodeSet ns;
  ns.dim = d;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double vol = 1.0;
  for (int k = 0; k < d; ++k) vol *= hi[k] - lo[k];
  std::vector<double> x(d);
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = 0; k < d; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * u(rng);
    ns.push(x, vol / static_cast<double>(count));
  }
  return ns;
}

}  // namespace detail

/// Quadrature nodes with area/volume weights for a region.
inline NodeSet region_nodes(const Region& region, const QuadratureSpec& q) {
  validate_region(region);
  return std::visit(
      [&](const auto& r) -> NodeSet {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, BallRegion>) {
          const int d = static_cast<int>(r.center.size());
          NodeSet ns;
          ns.dim = d;
          if (q.kind == QuadratureKind::MonteCarlo) {
            const auto& cloud = unit_ball_cloud(d, q.mc_count, q.seed);
            const double w = region_volume(region) / static_cast<double>(cloud.size());
            std::vector<double> x(d);
            for (std::size_t i = 0; i < cloud.size(); ++i) {
              for (int k = 0; k < d; ++k) x[k] = r.center[k] + r.radius * cloud.coords[i * d + k];
              ns.push(x, w);
            }
            return ns;
          }
          if (d == 1) return detail::tensor_gauss_box({r.center[0] - r.radius}, {r.center[0] + r.radius}, q.radial_order);
          if (d != 2)
            throw Error(ErrorKind::InvalidArgument, "polar-gauss quadrature covers 1- and 2-dimensional balls only");
          const PlanarRule pr = annulus_rule(0.0, r.radius, q.radial_order, q.angular_order);
          for (std::size_t i = 0; i < pr.size(); ++i) {
            const double x[2] = {r.center[0] + pr.x[i], r.center[1] + pr.y[i]};
            ns.push(x, pr.w[i]);
          }
          return ns;
        } else if constexpr (std::is_same_v<R, AnnulusRegion>) {
          NodeSet ns;
          ns.dim = 2;
          const PlanarRule pr = annulus_rule(r.r_in, r.r_out, q.radial_order, q.angular_order);
          for (std::size_t i = 0; i < pr.size(); ++i) {
            const double x[2] = {r.center[0] + pr.x[i], r.center[1] + pr.y[i]};
            ns.push(x, pr.w[i]);
          }
          return ns;
        } else {
          std::vector<double> lo, hi;
          if constexpr (std::is_same_v<R, RectRegion>) {
            lo = r.lo;
            hi = r.hi;
          } else {
            lo = {r.x_lo, 0.0};
            hi = {r.x_hi, r.y_hi};
          }
          if (q.kind == QuadratureKind::MonteCarlo) return detail::monte_carlo_box(lo, hi, q.mc_count, q.seed);
          return detail::tensor_gauss_box(lo, hi, q.radial_order);
        }
      },
      region);
}

/// A finite positive measure: weighted atoms, or Lebesgue measure on a region
/// discretized by a quadrature rule.
class MeasureSpace {
 public:
  static MeasureSpace discrete(std::vector<double> points, std::vector<double> weights) {
    NodeSet ns;
    ns.dim = 1;
    ns.coords = std::move(points);
    ns.weights = std::move(weights);
    return MeasureSpace(std::move(ns), std::nullopt);
  }

  static MeasureSpace discrete(NodeSet atoms) { return MeasureSpace(std::move(atoms), std::nullopt); }

  static MeasureSpace lebesgue(const Region& region, const QuadratureSpec& q) {
    return MeasureSpace(region_nodes(region, q), region);
  }

  const NodeSet& nodes() const { return nodes_; }
  int dim() const { return nodes_.dim; }
  double total_mass() const { return mass_; }
  bool is_discrete() const { return !region_.has_value(); }
  const std::optional<Region>& region() const { return region_; }

  MeasureSpace normalized() const {
    MeasureSpace out = *this;
    for (double& w : out.nodes_.weights) w /= mass_;
    out.mass_ = 1.0;
    return out;
  }

 private:
  MeasureSpace(NodeSet nodes, std::optional<Region> region) : nodes_(std::move(nodes)), region_(std::move(region)) {
    if (nodes_.dim < 1 || nodes_.coords.size() != nodes_.weights.size() * static_cast<std::size_t>(nodes_.dim))
      throw Error(ErrorKind::InvalidArgument, "atom coordinates and weights disagree in size");
    CompensatedSum s;
    for (double w : nodes_.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "measure weights must be finite and >= 0");
      s += w;
    }
    mass_ = s.value();
    if (!(mass_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "measure must have positive total mass");
  }

  NodeSet nodes_;
  std::optional<Region> region_;
  double mass_ = 0.0;
};

/// Integral of f against the node weights. Zero-weight nodes contribute 0
/// whatever f is there; infinities of one sign propagate.
inline double integrate_nodes(const NodeSet& nodes, std::span<const double> weights, const ScalarFn& f) {
  CompensatedSum s;
  bool pos_inf = false, neg_inf = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const double v = f(nodes.point(i));
    if (std::isnan(v)) throw Error(ErrorKind::NonIntegrable, "integrand is NaN at a node of positive weight");
    if (std::isinf(v)) {
      (v > 0 ? pos_inf : neg_inf) = true;
      continue;
    }
    s += w * v;
  }
  if (pos_inf && neg_inf) throw Error(ErrorKind::NonIntegrable, "integrand takes both +inf and -inf with positive weight");
  if (pos_inf) return std::numeric_limits<double>::infinity();
  if (neg_inf) return -std::numeric_limits<double>::infinity();
  return s.value();
}

inline double integrate(const MeasureSpace& ms, const ScalarFn& f) {
  return integrate_nodes(ms.nodes(), ms.nodes().weights, f);
}

/// Two measures mu <= nu on a common node set. `concentrated` marks the
/// nodes where nu - mu has positive mass.
class MeasurePair {
 public:
  /// Atoms shared by both measures; requires mu-weight <= nu-weight atomwise.
  static MeasurePair discrete(NodeSet atoms, std::vector<double> mu_weights) {
    if (mu_weights.size() != atoms.size())
      throw Error(ErrorKind::InvalidArgument, "mu and nu must be defined on the same atoms");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(mu_weights[i] >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mu weights must be >= 0");
      if (mu_weights[i] > atoms.weights[i])
        throw Error::hypothesis(1, "mu <= nu fails at atom " + std::to_string(i));
    }
    return MeasurePair(std::move(atoms), std::move(mu_weights));
  }

  static MeasurePair discrete(std::vector<double> points, std::vector<double> mu_weights, std::vector<double> nu_weights) {
    NodeSet ns;
    ns.dim = 1;
    ns.coords = std::move(points);
    ns.weights = std::move(nu_weights);
    if (ns.coords.size() != ns.weights.size()) throw Error(ErrorKind::InvalidArgument, "points and nu weights differ in size");
    return discrete(std::move(ns), std::move(mu_weights));
  }

  /// nu = Lebesgue measure on `whole`, mu = nu restricted to `part`. Nodes of
  /// `part` come first, followed by nodes covering whole \ part.
  static MeasurePair restriction(const Region& part, const Region& whole, const QuadratureSpec& q) {
    validate_region(part);
    validate_region(whole);
    if (region_dim(part) != region_dim(whole)) throw Error(ErrorKind::InvalidArgument, "regions differ in dimension");
    NodeSet inner = region_nodes(part, q);
    for (std::size_t i = 0; i < inner.size(); ++i)
      if (inner.weights[i] > 0.0 && !region_contains(whole, inner.point(i)) && !on_boundary_of(whole, inner.point(i)))
        throw Error(ErrorKind::InvalidArgument, "restriction region must lie inside the carrier region");
    NodeSet outer = difference_nodes(part, whole, q);

    NodeSet all;
    all.dim = inner.dim;
    std::vector<double> mu;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      all.push(inner.point(i), inner.weights[i]);
      mu.push_back(inner.weights[i]);
    }
    for (std::size_t i = 0; i < outer.size(); ++i) {
      all.push(outer.point(i), outer.weights[i]);
      mu.push_back(0.0);
    }
    return MeasurePair(std::move(all), std::move(mu));
  }

  const NodeSet& nodes() const { return nodes_; }
  std::span<const double> mu_weights() const { return mu_; }
  std::span<const double> nu_weights() const { return nodes_.weights; }
  bool concentrated(std::size_t i) const { return nodes_.weights[i] > mu_[i]; }

  double mu_mass() const {
    CompensatedSum s;
    for (double w : mu_) s += w;
    return s.value();
  }
  double nu_mass() const {
    CompensatedSum s;
    for (double w : nodes_.weights) s += w;
    return s.value();
  }

 private:
  MeasurePair(NodeSet nodes, std::vector<double> mu) : nodes_(std::move(nodes)), mu_(std::move(mu)) {}

  static bool on_boundary_of(const Region& region, std::span<const double> x) {
    if (const auto* b = std::get_if<BallRegion>(&region)) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < b->center.size(); ++i) d2 += (x[i] - b->center[i]) * (x[i] - b->center[i]);
      return std::abs(std::sqrt(d2) - b->radius) <= 1e-12 * (1.0 + b->radius);
    }
    return false;
  }

  static bool same_center(const std::vector<double>& a, const std::vector<double>& b) { return a == b; }

  // Nodes covering whole \ part. Concentric planar balls get an exact annulus
  // rule; otherwise the carrier rule is filtered by the indicator of the
  // complement.
  static NodeSet difference_nodes(const Region& part, const Region& whole, const QuadratureSpec& q) {
    NodeSet empty;
    empty.dim = region_dim(whole);
    const auto* pb = std::get_if<BallRegion>(&part);
    const auto* wb = std::get_if<BallRegion>(&whole);
    if (pb && wb && same_center(pb->center, wb->center)) {
      if (pb->radius == wb->radius) return empty;
      if (pb->center.size() == 2 && q.kind == QuadratureKind::PolarGauss)
        return region_nodes(AnnulusRegion{pb->center, pb->radius, wb->radius}, q);
    }
    if (const auto* pr = std::get_if<RectRegion>(&part))
      if (const auto* wr = std::get_if<RectRegion>(&whole))
        if (pr->lo == wr->lo && pr->hi == wr->hi) return empty;
    NodeSet all = region_nodes(whole, q);
    NodeSet out;
    out.dim = all.dim;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (!region_contains(part, all.point(i))) out.push(all.point(i), all.weights[i]);
    return out;
  }

  NodeSet nodes_;
  std::vector<double> mu_;
};

}  // namespace jbound
