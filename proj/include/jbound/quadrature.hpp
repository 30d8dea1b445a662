#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>
#include <vector>

#include "error.hpp"

namespace jbound {

/// Neumaier-compensated running sum. Summation order is the call order, so
/// results are reproducible bit-for-bit.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

namespace detail {

inline GaussLegendreRule compute_gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence: p1 = P_n(x), p2 = P_{n-1}(x).
      double p1 = 1.0, p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * x * p2 - (k - 1.0) * p3) / k;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule of order n on [-1, 1]; computed once per order and
/// shared (thread-safe).
inline const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(detail::compute_gauss_legendre(n));
  return *slot;
}

/// Planar node set: offsets (x, y) with weights.
struct PlanarRule {
  std::vector<double> x, y, w;
  std::size_t size() const { return w.size(); }
};

/// Polar tensor Gauss-Legendre rule on the annulus r0 <= |u| <= r1 around the
/// origin; weights carry the area element (sum to pi (r1^2 - r0^2)).
inline PlanarRule annulus_rule(double r0, double r1, int radial, int angular) {
  const auto& gr = gauss_legendre(radial);
  const auto& ga = gauss_legendre(angular);
  PlanarRule rule;
  rule.x.reserve(static_cast<std::size_t>(radial) * angular);
  rule.y.reserve(rule.x.capacity());
  rule.w.reserve(rule.x.capacity());
  const double half = 0.5 * (r1 - r0);
  for (int i = 0; i < radial; ++i) {
    const double t = r0 + half * (gr.nodes[i] + 1.0);
    const double wt = half * gr.weights[i] * t;
    for (int j = 0; j < angular; ++j) {
      const double th = std::numbers::pi * (ga.nodes[j] + 1.0);
      rule.x.push_back(t * std::cos(th));
      rule.y.push_back(t * std::sin(th));
      rule.w.push_back(wt * std::numbers::pi * ga.weights[j]);
    }
  }
  return rule;
}

/// Unit-disc rule with weights normalized to a probability (mean) rule.
/// Cached per (radial, angular).
inline const PlanarRule& unit_disc_mean_rule(int radial, int angular) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<PlanarRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{radial, angular}];
  if (!slot) {
    PlanarRule rule = annulus_rule(0.0, 1.0, radial, angular);
    for (double& w : rule.w) w /= std::numbers::pi;
    slot = std::make_unique<PlanarRule>(std::move(rule));
  }
  return *slot;
}

/// Unit-circle angular rule (Gauss-Legendre in theta), weights sum to one.
inline const PlanarRule& unit_circle_mean_rule(int angular) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<PlanarRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[angular];
  if (!slot) {
    const auto& ga = gauss_legendre(angular);
    auto rule = std::make_unique<PlanarRule>();
    for (int j = 0; j < angular; ++j) {
      const double th = std::numbers::pi * (ga.nodes[j] + 1.0);
      rule->x.push_back(std::cos(th));
      rule->y.push_back(std::sin(th));
      rule->w.push_back(0.5 * ga.weights[j]);
    }
    slot = std::move(rule);
  }
  return *slot;
}

/// Points in R^dim stored row-major, equal weights 1/count.
struct MonteCarloCloud {
  int dim = 0;
  std::vector<double> coords;
  std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
};

namespace detail {

inline MonteCarloCloud generate_cloud(int dim, std::size_t count, std::uint64_t seed, bool on_sphere) {
  MonteCarloCloud cloud;
  cloud.dim = dim;
  cloud.coords.resize(count * static_cast<std::size_t>(dim));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    double* p = &cloud.coords[k * static_cast<std::size_t>(dim)];
    double norm2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      p[d] = normal(rng);
      norm2 += p[d] * p[d];
    }
    double scale = 1.0 / std::sqrt(norm2);
    if (!on_sphere) scale *= std::pow(uniform(rng), 1.0 / dim);
    for (int d = 0; d < dim; ++d) p[d] *= scale;
  }
  return cloud;
}

}  // namespace detail

/// Uniform samples in the unit ball (or on the unit sphere) of R^dim, cached
/// per (dim, count, seed, sphere).
inline const MonteCarloCloud& unit_ball_cloud(int dim, std::size_t count, std::uint64_t seed, bool on_sphere = false) {
  if (dim < 1 || count == 0) throw Error(ErrorKind::InvalidArgument, "Monte Carlo cloud needs dim >= 1, count >= 1");
  static std::mutex mutex;
  static std::map<std::tuple<int, std::size_t, std::uint64_t, bool>, std::unique_ptr<MonteCarloCloud>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, count, seed, on_sphere}];
  if (!slot) slot = std::make_unique<MonteCarloCloud>(detail::generate_cloud(dim, count, seed, on_sphere));
  return *slot;
}

enum class QuadratureKind { PolarGauss, MonteCarlo };

/// How integrals over balls, spheres and domains are discretized.
struct QuadratureSpec {
  QuadratureKind kind = QuadratureKind::PolarGauss;
  int radial_order = 64;
  int angular_order = 128;
  std::size_t mc_count = 200000;
  std::uint64_t seed = 0;

  static QuadratureSpec polar_gauss(int radial = 64, int angular = 128) {
    if (radial < 1 || angular < 1) throw Error(ErrorKind::InvalidArgument, "quadrature orders must be >= 1");
    return {QuadratureKind::PolarGauss, radial, angular, 0, 0};
  }
  static QuadratureSpec monte_carlo(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error(ErrorKind::InvalidArgument, "Monte Carlo count must be >= 1");
    return {QuadratureKind::MonteCarlo, 64, 128, count, seed};
  }
};

}  // namespace jbound
