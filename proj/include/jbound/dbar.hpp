#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "geom.hpp"
#include "quadrature.hpp"

namespace jbound {

struct BumpTerm {
  Complex coef;
  int z_pow = 0;
  int zbar_pow = 0;
};

/// g(z) = P(z, conj z) exp(1 / (|z/R|^2 - 1)) on |z| < R, zero outside.
class BumpFunction {
 public:
  BumpFunction(std::vector<BumpTerm> terms, double radius) : terms_(std::move(terms)), radius_(radius) {
    if (!(radius > 0.0) || std::isinf(radius)) throw Error(ErrorKind::InvalidArgument, "bump radius must be finite and > 0");
    for (const auto& t : terms_)
      if (t.z_pow < 0 || t.zbar_pow < 0) throw Error(ErrorKind::InvalidArgument, "bump powers must be >= 0");
  }

  const std::vector<BumpTerm>& terms() const { return terms_; }
  double support_radius() const { return radius_; }

  /// exp(1/(s - 1)) for s = |z/R|^2 < 1.
  double envelope_of_sq(double s) const { return s < 1.0 ? std::exp(1.0 / (s - 1.0)) : 0.0; }

  Complex operator()(Complex z) const {
    const double s = std::norm(z) / (radius_ * radius_);
    if (s >= 1.0) return 0.0;
    return poly(z) * envelope_of_sq(s);
  }

  Complex poly(Complex z) const {
    Complex p = 0.0;
    const Complex zb = std::conj(z);
    for (const auto& t : terms_) p += t.coef * ipow(z, t.z_pow) * ipow(zb, t.zbar_pow);
    return p;
  }

  BumpFunction scaled(Complex c) const {
    BumpFunction out = *this;
    for (auto& t : out.terms_) t.coef *= c;
    return out;
  }

 private:
  static Complex ipow(Complex z, int k) {
    Complex r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
  }

  std::vector<BumpTerm> terms_;
  double radius_;
};

/// Solid Cauchy transform -(1/pi) int g(zeta) / (zeta - z) dlambda(zeta) by
/// a polar rule centered at z: composite Gauss-Legendre in rho over
/// [0, |z| + R] (q.radial_order nodes on each of 8 pieces), trapezoid with
/// q.angular_order nodes in theta. The 1/rho singularity cancels against the
/// area element.
template <class G>
Complex cauchy_solve(const G& g, double support_radius, Complex z, const QuadratureSpec& q) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error(ErrorKind::QuadratureFailure, "z is not finite");
  const auto& gl = gauss_legendre(q.radial_order);
  const double rho_max = std::abs(z) + support_radius;
  constexpr int kPieces = 8;
  const int m = q.angular_order;
  std::vector<Complex> dirs(m);
  for (int j = 0; j < m; ++j) dirs[j] = std::polar(1.0, 2.0 * std::numbers::pi * j / m);
  Complex sum = 0.0;
  for (int piece = 0; piece < kPieces; ++piece) {
    const double a = rho_max * piece / kPieces, b = rho_max * (piece + 1) / kPieces;
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double rho = a + half * (gl.nodes[i] + 1.0);
      Complex ring = 0.0;
      for (int j = 0; j < m; ++j) ring += g(z + rho * dirs[j]) * std::conj(dirs[j]);
      sum += half * gl.weights[i] * ring;
    }
  }
  const Complex f = -(2.0 / m) * sum;  // -(1/pi) * (2 pi / m) * sum
  if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) throw Error(ErrorKind::QuadratureFailure, "Cauchy transform is not finite");
  return f;
}

inline Complex cauchy_solve(const BumpFunction& g, Complex z, const QuadratureSpec& q) {
  return cauchy_solve(g, g.support_radius(), z, q);
}

/// Cauchy transform of a bump datum reduced to radial integrals. Expanding
/// 1/(zeta - z) in powers of zeta/z (|zeta| < |z|) or z/zeta (|zeta| > |z|),
/// the term c zeta^j conj(zeta)^k contributes
///   2c z^(j-k-1) I_k(0, |z|)       if k >= j,
///  -2c z^(j-k-1) I_k(|z|, R)       if j > k,
/// with I_k(a, b) = int_a^b t^(2k+1) exp(1/(t^2/R^2 - 1)) dt.
class CauchyTransform {
 public:
  explicit CauchyTransform(BumpFunction g, int pieces = 16, int order = 32) : g_(std::move(g)), pieces_(pieces), order_(order) {
    const double R = g_.support_radius();
    for (const auto& t : g_.terms()) full_[t.zbar_pow] = radial(t.zbar_pow, 0.0, R);
  }

  const BumpFunction& datum() const { return g_; }

  Complex operator()(Complex z) const {
    const double R = g_.support_radius();
    const double az = std::abs(z);
    Complex f = 0.0;
    if (az == 0.0) {
      // Only j = k + 1 survives at the origin.
      for (const auto& t : g_.terms())
        if (t.z_pow == t.zbar_pow + 1) f -= 2.0 * t.coef * radial(t.zbar_pow, 0.0, R);
      return f;
    }
    std::map<int, std::pair<double, double>> cache;  // k -> (I(0,|z|), I(|z|,R))
    for (const auto& t : g_.terms()) {
      const int j = t.z_pow, k = t.zbar_pow;
      auto it = cache.find(k);
      if (it == cache.end()) {
        std::pair<double, double> v;
        if (az >= R) {
          v = {full_.at(k), 0.0};
        } else {
          v.first = radial(k, 0.0, az);
          v.second = radial(k, az, R);
        }
        it = cache.emplace(k, v).first;
      }
      const Complex zp = j - k - 1 >= 0 ? ipow(z, j - k - 1) : 1.0 / ipow(z, k + 1 - j);
      if (k >= j) {
        f += 2.0 * t.coef * zp * it->second.first;
      } else {
        f -= 2.0 * t.coef * zp * it->second.second;
      }
    }
    return f;
  }

 private:
  static Complex ipow(Complex z, int k) {
    Complex r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
  }

  double radial(int k, double a, double b) const {
    if (b <= a) return 0.0;
    const auto& gl = gauss_legendre(order_);
    const double R = g_.support_radius();
    CompensatedSum s;
    for (int piece = 0; piece < pieces_; ++piece) {
      const double lo = a + (b - a) * piece / pieces_, hi = a + (b - a) * (piece + 1) / pieces_;
      const double half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double t = lo + half * (gl.nodes[i] + 1.0);
        s += half * gl.weights[i] * std::pow(t, 2 * k + 1) * g_.envelope_of_sq(t * t / (R * R));
      }
    }
    return s.value();
  }

  BumpFunction g_;
  int pieces_;
  int order_;
  std::map<int, double> full_;
};

struct DbarData {
  BumpFunction g;
  Weight v;
  double a;
};

/// J(g, v) = int |g|^2 e^(-v) (1 + |z|^2)^(2 - a) dlambda over the support.
inline double j_functional(const DbarData& d, const QuadratureSpec& q) {
  const PlanarRule rule = annulus_rule(0.0, d.g.support_radius(), q.radial_order, q.angular_order);
  CompensatedSum s;
  CPoint pt(1);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    pt[0] = Complex(rule.x[i], rule.y[i]);
    const double v = std::norm(d.g(pt[0])) * std::exp(-d.v(pt)) * std::pow(1.0 + std::norm(pt[0]), 2.0 - d.a);
    s += rule.w[i] * v;
  }
  const double j = s.value();
  if (!std::isfinite(j)) throw Error(ErrorKind::Divergent, "J(g, v) is not finite");
  return j;
}

/// Finite-difference residual max |dbar f - g| / max |g| over a square grid
/// covering the support (central differences, step h).
inline double dbar_residual(const CauchyTransform& f, int grid = 41, double h = 1e-4) {
  const BumpFunction& g = f.datum();
  const double R = g.support_radius();
  double worst = 0.0, gmax = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int k = 0; k < grid; ++k) {
      const Complex z(-R + 2.0 * R * i / (grid - 1), -R + 2.0 * R * k / (grid - 1));
      const Complex fx = (f(z + h) - f(z - h)) / (2.0 * h);
      const Complex fy = (f(z + Complex(0.0, h)) - f(z - Complex(0.0, h))) / (2.0 * h);
      const Complex dbar = 0.5 * (fx + Complex(0.0, 1.0) * fy);
      const Complex gz = g(z);
      worst = std::max(worst, std::abs(dbar - gz));
      gmax = std::max(gmax, std::abs(gz));
    }
  }
  return gmax == 0.0 ? worst : worst / gmax;
}

/// Averaged growth check at one (z, r).
struct DbarCheckReport {
  Complex z;
  double r = 0.0;
  double lhs = 0.0;  // B_{ln|f|}(z, r)
  double rhs = 0.0;
  double slack = 0.0;
  double const_a_used = 0.0;
  bool premise_holds = false;  // int |f|^2 e^{-v} (1+|z|^2)^{-a} <= J/a
  bool degenerate = false;     // f == 0
  double weighted_norm_sq = 0.0;
  double j_value = 0.0;
  // Individual steps of the chain: B_{ln(|f|^2 e^-w)} <= ln B_{|f|^2 e^-w}
  // and B_{|f|^2 e^-w} <= (n!/(pi^n r^2n)) int |f|^2 e^-w.
  double jensen_step_slack = 0.0;
  double inclusion_step_slack = 0.0;
};

/// A d-bar datum with its Cauchy-transform solution and the integrals that
/// do not depend on (z, r).
class DbarProblem {
 public:
  DbarProblem(DbarData data, const QuadratureSpec& q) : data_(std::move(data)), f_(data_.g) {
    if (!(data_.a > 0.0)) throw Error(ErrorKind::InvalidArgument, "a must be > 0");
    j_ = j_functional(data_, q);
    norm_sq_ = integrate_domain(
        [&](CSpan z) {
          return std::norm(f_(z[0])) * std::exp(-data_.v(z)) * std::pow(1.0 + std::norm(z[0]), -data_.a);
        },
        Domain::full_space(1), q);
  }

  const DbarData& data() const { return data_; }
  const CauchyTransform& solution() const { return f_; }
  double j_value() const { return j_; }
  double weighted_norm_sq() const { return norm_sq_; }
  bool premise_holds() const { return norm_sq_ <= j_ / data_.a; }

  /// The chain with n = 1, w = v + a ln(1 + |z|^2):
  ///   B_{ln|f|} <= (1/2)(B_v + a B_{ln(1+|.|^2)}) + ln(1/r) + (1/2) ln(1/pi) + (1/2) ln M,
  /// M = J/a when the weighted estimate for f holds, else the measured norm.
  /// ball is the rule used for the means over B(z, r).
  DbarCheckReport check(Complex z, double r, const QuadratureSpec& ball) const {
    if (!(r > 0.0) || !(r < 1.0))
      throw Error(ErrorKind::RadiusViolation, "radius must satisfy 0 < r < min{1, dist(z, complement)}");
    const CPoint zc{z};
    const double a = data_.a;
    const double lhs = ball_mean([&](CSpan p) { return std::max(kLogFloor, std::log(std::abs(f_(p[0])))); }, zc, r, ball);
    const double bv = ball_mean(data_.v, zc, r, ball);
    const double blog = ball_mean(Weight::log1p_abs_sq(), zc, r, ball);
    auto w = [&](CSpan p) { return data_.v(p) + a * std::log1p(std::norm(p[0])); };

    DbarCheckReport rep;
    rep.z = z;
    rep.r = r;
    rep.lhs = lhs;
    rep.j_value = j_;
    rep.weighted_norm_sq = norm_sq_;
    rep.premise_holds = premise_holds();
    rep.degenerate = j_ == 0.0 || norm_sq_ == 0.0;
    const double m_used = rep.premise_holds ? j_ / a : norm_sq_;
    const double lpi = -std::log(std::numbers::pi);
    rep.rhs = 0.5 * bv + 0.5 * a * blog + std::log(1.0 / r) + 0.5 * lpi + 0.5 * std::log(m_used);
    rep.slack = rep.rhs - rep.lhs;
    if (!rep.degenerate) {
      rep.const_a_used = rep.rhs - (0.5 * bv + a * std::log(1.0 + std::abs(z)) + std::log(1.0 / r) + 0.5 * std::log(j_));
      const double b_logdens = ball_mean(
          [&](CSpan p) { return std::max(kLogFloor, 2.0 * std::log(std::abs(f_(p[0])))) - w(p); }, zc, r, ball);
      const double b_dens = ball_mean([&](CSpan p) { return std::norm(f_(p[0])) * std::exp(-w(p)); }, zc, r, ball);
      rep.jensen_step_slack = std::log(b_dens) - b_logdens;
      rep.inclusion_step_slack = norm_sq_ / (std::numbers::pi * r * r) - b_dens;
    }
    return rep;
  }

 private:
  DbarData data_;
  CauchyTransform f_;
  double j_ = 0.0;
  double norm_sq_ = 0.0;
};

/// One-shot form of DbarProblem::check.
inline DbarCheckReport check_dbar_bound(const DbarData& d, Complex z, double r, const QuadratureSpec& q,
                                        const QuadratureSpec& ball = QuadratureSpec::polar_gauss(16, 32)) {
  if (!(r > 0.0) || !(r < 1.0))
    throw Error(ErrorKind::RadiusViolation, "radius must satisfy 0 < r < min{1, dist(z, complement)}");
  return DbarProblem(d, q).check(z, r, ball);
}

}  // namespace jbound
