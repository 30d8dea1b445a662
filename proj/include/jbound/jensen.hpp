#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "convex.hpp"
#include "error.hpp"
#include "measure.hpp"

namespace jbound {

/// Both sides of Phi(int f dmu) <= int Phi(f) dmu on a probability space.
struct JensenReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool mean_in_domain = false;
  double slack = 0.0;  // rhs - lhs
};

inline JensenReport jensen(const MeasureSpace& ms, const ScalarFn& f, const ConvexFunction& phi) {
  if (std::abs(ms.total_mass() - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "jensen needs a probability measure (use normalized())");
  const NodeSet& nodes = ms.nodes();
  const Interval& dom = phi.domain();

  // f is evaluated once per node; both integrals reuse the values.
  std::vector<double> fx(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes.weights[i] == 0.0) continue;
    fx[i] = f(nodes.point(i));
    if (std::isnan(fx[i]) || !dom.contains(fx[i]))
      throw Error(ErrorKind::DomainViolation, "f(x) = " + std::to_string(fx[i]) + " outside " + dom.to_string());
  }
  CompensatedSum mean, phi_mean;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = nodes.weights[i];
    if (w == 0.0) continue;
    mean += w * fx[i];
    const double p = phi.eval(fx[i]);
    if (!std::isfinite(p)) throw Error(ErrorKind::NonIntegrable, "Phi(f(x)) is not finite");
    phi_mean += w * p;
  }
  JensenReport rep;
  const double m = mean.value();
  rep.mean_in_domain = dom.contains(m);
  if (!rep.mean_in_domain)
    throw Error(ErrorKind::MeanOutsideDomain, "mean " + std::to_string(m) + " outside " + dom.to_string());
  rep.lhs = phi.eval(m);
  rep.rhs = phi_mean.value();
  rep.slack = rep.rhs - rep.lhs;
  return rep;
}

/// Right-hand side of the mean-value bound for u against v, with its pieces:
/// mean_u <= mean_v + penalty, penalty = supinv(argument).
struct MeanBoundReport {
  double mu_mass = 0.0;
  double mean_u = 0.0;
  double mean_v = 0.0;
  double argument = 0.0;  // (1/mu(X)) int Phi(u - v) dnu
  double penalty = 0.0;   // sup Phi^{-1}(argument)
  double rhs = 0.0;       // mean_v + penalty
};

namespace detail {

struct PairIntegrals {
  double mu_mass, mean_u, mean_v, phi_integral;  // phi_integral = int Phi(u-v) dnu
};

// Verifies hypotheses (1), (3) and the sign part of (4); returns the raw
// integrals needed by every form of the bound.
inline PairIntegrals pair_integrals(const MeasurePair& pair, const ScalarFn& u, const ScalarFn& v,
                                    const ConvexFunction& phi) {
  const NodeSet& nodes = pair.nodes();
  const auto mu = pair.mu_weights();
  const auto nu = pair.nu_weights();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (mu[i] > nu[i]) throw Error::hypothesis(1, "mu <= nu fails at node " + std::to_string(i));
  const double mass = pair.mu_mass();
  if (!(mass > 0.0)) throw Error::hypothesis(1, "mu must be a nonzero measure (mu(X) = 0)");

  const Interval& dom = phi.domain();
  CompensatedSum su, sv, sphi;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nu[i] == 0.0) continue;
    const auto x = nodes.point(i);
    const double ui = u(x);
    const double vi = v(x);
    const double d = ui - vi;
    if (mu[i] > 0.0) {
      if (!std::isfinite(ui) || !std::isfinite(vi))
        throw Error::hypothesis(3, "u and v must be finite (integrable) on the support of mu");
      su += mu[i] * ui;
      sv += mu[i] * vi;
    }
    if (std::isnan(d) || !dom.contains(d))
      throw Error::hypothesis(3, "u - v = " + std::to_string(d) + " outside the domain of Phi");
    const double p = phi.eval(d);
    if (!std::isfinite(p)) throw Error::hypothesis(3, "Phi(u - v) is not nu-integrable");
    if (pair.concentrated(i) && p < 0.0)
      throw Error::hypothesis(4, "Phi(u - v) < 0 where nu - mu is concentrated");
    sphi += nu[i] * p;
  }
  return {mass, su.value() / mass, sv.value() / mass, sphi.value()};
}

}  // namespace detail

/// mean_mu(u) <= mean_mu(v) + sup Phi^{-1}((1/mu(X)) int Phi(u - v) dnu),
/// after checking hypotheses (1)-(4) on the nodes. Throws
/// HypothesisViolation naming the failed clause.
inline MeanBoundReport mean_bound(const MeasurePair& pair, const ScalarFn& u, const ScalarFn& v, const SupInverse& si) {
  const auto in = detail::pair_integrals(pair, u, v, si.phi());
  MeanBoundReport rep;
  rep.mu_mass = in.mu_mass;
  rep.mean_u = in.mean_u;
  rep.mean_v = in.mean_v;
  rep.argument = in.phi_integral / in.mu_mass;
  if (!si.accepts(rep.argument))
    throw Error::hypothesis(4, "argument " + std::to_string(rep.argument) + " outside im Phi " + si.domain().to_string());
  rep.penalty = si.eval(rep.argument);
  rep.rhs = rep.mean_v + rep.penalty;
  return rep;
}

/// Lebesgue form: nu = Lebesgue measure on `whole`, mu its restriction to
/// `part`. Identical to mean_bound on MeasurePair::restriction(part, whole, q).
inline MeanBoundReport mean_bound_lebesgue(const Region& part, const Region& whole, const ScalarFn& u,
                                           const ScalarFn& v, const SupInverse& si, const QuadratureSpec& q) {
  return mean_bound(MeasurePair::restriction(part, whole, q), u, v, si);
}

/// Bound with the mass factor separated from the integral by an upper
/// condition: mean_v + psi1(1/mu(X)) (*|+) psi2(int Phi(u - v) dnu).
inline MeanBoundReport separated_bound(const MeasurePair& pair, const ScalarFn& u, const ScalarFn& v,
                                       const SupInverse& si, const std::function<double(double)>& psi1,
                                       const std::function<double(double)>& psi2, UpperKind kind) {
  const auto in = detail::pair_integrals(pair, u, v, si.phi());
  MeanBoundReport rep;
  rep.mu_mass = in.mu_mass;
  rep.mean_u = in.mean_u;
  rep.mean_v = in.mean_v;
  rep.argument = in.phi_integral / in.mu_mass;
  if (!si.accepts(rep.argument))
    throw Error::hypothesis(4, "argument " + std::to_string(rep.argument) + " outside im Phi " + si.domain().to_string());
  const double a = psi1(1.0 / in.mu_mass);
  const double b = psi2(in.phi_integral);
  rep.penalty = kind == UpperKind::Power ? a * b : a + b;
  rep.rhs = rep.mean_v + rep.penalty;
  return rep;
}

/// Phi = (t+)^p with psi1 = psi2 = y^(1/p):
/// mean_v + mu(X)^(-1/p) (int ((u - v)+)^p dnu)^(1/p).
inline MeanBoundReport separated_bound_power(const MeasurePair& pair, const ScalarFn& u, const ScalarFn& v, double p) {
  const SupInverse si = sup_inverse(ConvexFunction::power(p));
  auto root = [p](double y) { return std::pow(y, 1.0 / p); };
  return separated_bound(pair, u, v, si, root, root, UpperKind::Power);
}

/// Phi = exp(p t) with psi1 = psi2 = (1/p) ln y:
/// mean_v + (1/p) ln(1/mu(X)) + (1/p) ln int exp(p (u - v)) dnu.
inline MeanBoundReport separated_bound_exp(const MeasurePair& pair, const ScalarFn& u, const ScalarFn& v, double p) {
  const SupInverse si = sup_inverse(ConvexFunction::exponential(p));
  auto lg = [p](double y) { return std::log(y) / p; };
  return separated_bound(pair, u, v, si, lg, lg, UpperKind::Log);
}

}  // namespace jbound
