#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace jbound {

struct RadiusMinimum {
  double r_star = 0.0;
  double value = 0.0;
  // Smallest and largest grid radius with a finite objective.
  double feasible_lo = 0.0;
  double feasible_hi = 0.0;
};

namespace detail {

inline constexpr int kRadiusGridPoints = 128;
inline constexpr double kRadiusGridLow = 1e-6;
inline constexpr double kRadiusGridHighGap = 1e-12;
inline constexpr double kInfiniteRadiusCap = 1e3;
inline constexpr double kGoldenTol = 1e-10;

inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> r(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) r[i] = std::exp(a + (b - a) * i / (count - 1));
  r.front() = lo;
  r.back() = hi;
  return r;
}

}  // namespace detail

/// Approximates inf over 0 < r < r_max of objective(r) from inside the
/// interval. Every admissible r yields a valid upper bound, so a coarse or
/// truncated search can only weaken the result, never invalidate it.
///
/// Log grid of 128 radii on [1e-6 r_max, (1 - 1e-12) r_max] (cap 1e3 when
/// r_max is infinite, extended once by 1e3 if still decreasing at the cap),
/// golden section in ln r around the best grid point, then one parabolic
/// step. Non-finite objective values count as infeasible.
inline RadiusMinimum minimize_over_r(const std::function<double(double)>& objective, double r_max) {
  if (!(r_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "r_max must be > 0");
  const bool unbounded = std::isinf(r_max);
  const double top = unbounded ? detail::kInfiniteRadiusCap : r_max;
  const double hi = unbounded ? top : top * (1.0 - detail::kRadiusGridHighGap);

  std::vector<double> rs = detail::log_grid(detail::kRadiusGridLow * top, hi, detail::kRadiusGridPoints);
  std::vector<double> fs;
  fs.reserve(rs.size());
  auto eval = [&](double r) {
    const double f = objective(r);
    return std::isnan(f) || f == std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::infinity() : f;
  };
  for (double r : rs) fs.push_back(eval(r));

  auto argmin = [&] {
    return static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  };
  std::size_t k = argmin();
  if (unbounded && k + 1 == rs.size() && std::isfinite(fs[k])) {
    auto ext = detail::log_grid(hi, hi * 1e3, detail::kRadiusGridPoints);
    for (std::size_t i = 1; i < ext.size(); ++i) {
      rs.push_back(ext[i]);
      fs.push_back(eval(ext[i]));
    }
    k = argmin();
  }

  RadiusMinimum out;
  bool any = false;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (fs[i] == std::numeric_limits<double>::infinity()) continue;
    if (!any) out.feasible_lo = rs[i];
    out.feasible_hi = rs[i];
    any = true;
  }
  if (!any) throw Error(ErrorKind::NoFiniteValue, "objective is not finite anywhere on the radius grid");

  double best_r = rs[k], best_f = fs[k];
  if (best_f == -std::numeric_limits<double>::infinity()) return {best_r, best_f, out.feasible_lo, out.feasible_hi};

  auto consider = [&](double r, double f) {
    if (f < best_f) {
      best_f = f;
      best_r = r;
    }
  };

  // Golden section in s = ln r on the bracket around the grid minimum.
  const double s_lo = std::log(rs[k == 0 ? 0 : k - 1]);
  const double s_hi = std::log(rs[std::min(k + 1, rs.size() - 1)]);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = s_lo, b = s_hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = eval(std::exp(c)), fd = eval(std::exp(d));
  consider(std::exp(c), fc);
  consider(std::exp(d), fd);
  while (b - a > detail::kGoldenTol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = eval(std::exp(c));
      consider(std::exp(c), fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = eval(std::exp(d));
      consider(std::exp(d), fd);
    }
  }

  // Parabolic step on a symmetric stencil; kept when it does not lose
  // more than rounding noise.
  const double h = 1e-5 * best_r;
  if (best_r - h > rs.front() && best_r + h < rs.back()) {
    const double f0 = best_f;
    const double fm = eval(best_r - h), fp = eval(best_r + h);
    const double curv = fp - 2.0 * f0 + fm;
    if (std::isfinite(fm) && std::isfinite(fp) && curv > 0.0) {
      const double step = std::clamp(-0.5 * h * (fp - fm) / curv, -h, h);
      const double rv = best_r + step;
      const double fv = eval(rv);
      if (fv <= f0 + 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0))) {
        best_r = rv;
        best_f = fv;
      }
    }
  }
  out.r_star = best_r;
  out.value = best_f;
  return out;
}

}  // namespace jbound
