#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <jbound/dbar.hpp>
#include <jbound/properties.hpp>

using namespace jbound;

namespace {

constexpr double kPi = std::numbers::pi;
const QuadratureSpec kPolar = QuadratureSpec::polar_gauss();

// chi(z) = exp(1/(|z/R|^2 - 1)) and its d-bar derivative
// -chi(z) z / (R^2 (s - 1)^2), s = |z/R|^2.
struct Chi {
  double R;
  Complex value(Complex z) const {
    const double s = std::norm(z) / (R * R);
    return s < 1.0 ? std::exp(1.0 / (s - 1.0)) : 0.0;
  }
  Complex dbar(Complex z) const {
    const double s = std::norm(z) / (R * R);
    if (s >= 1.0) return 0.0;
    return -std::exp(1.0 / (s - 1.0)) * z / (R * R * (s - 1.0) * (s - 1.0));
  }
};

// Composite Simpson on [0, 1] for 2 pi int t exp(2/(t^2 - 1)) dt.
double bump_sq_integral() {
  const int n = 200000;
  const double h = 1.0 / n;
  auto f = [](double t) { return t >= 1.0 ? 0.0 : t * std::exp(2.0 / (t * t - 1.0)); };
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return 2.0 * kPi * s * h / 3.0;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::IoError;
}

const BumpFunction kBumpA({{1.0, 0, 0}}, 1.0);
const BumpFunction kBumpB({{Complex(1.0, 0.5), 1, 0}, {0.5, 0, 1}}, 1.0);
const BumpFunction kBumpC({{0.3, 0, 0}, {Complex(0.0, 1.0), 2, 0}, {-0.7, 1, 1}, {0.4, 0, 2}}, 1.5);

}  // namespace

TEST(Bump, SupportAndValues) {
  EXPECT_EQ(kBumpA(Complex(1.0, 0.0)), Complex(0.0));
  EXPECT_EQ(kBumpA(Complex(0.8, 0.8)), Complex(0.0));
  EXPECT_NEAR(kBumpA(0.0).real(), std::exp(-1.0), 1e-16);
  const Complex z(0.3, -0.4);
  EXPECT_NEAR(std::abs(kBumpB(z) - (Complex(1.0, 0.5) * z + 0.5 * std::conj(z)) * std::exp(1.0 / (0.25 - 1.0))), 0.0, 1e-15);
  EXPECT_THROW(BumpFunction({{1.0, -1, 0}}, 1.0), Error);
  EXPECT_THROW(BumpFunction({{1.0, 0, 0}}, 0.0), Error);
}

TEST(CauchySolve, ZeroDatum) {
  const BumpFunction zero({}, 1.0);
  EXPECT_EQ(cauchy_solve(zero, Complex(0.3, 0.2), kPolar), Complex(0.0));
  EXPECT_EQ(CauchyTransform(zero)(Complex(0.3, 0.2)), Complex(0.0));
  EXPECT_EQ(CauchyTransform(zero)(Complex(3.0, 0.0)), Complex(0.0));
}

TEST(CauchySolve, RecoversBumpFromItsDbar) {
  const Chi chi{1.0};
  auto g = [&](Complex z) { return chi.dbar(z); };
  const auto fine = QuadratureSpec::polar_gauss(64, 2048);
  for (Complex z : {Complex(0.0, 0.0), Complex(0.3, -0.2), Complex(0.7, 0.1), Complex(-0.2, 0.9), Complex(2.0, 1.0)}) {
    EXPECT_NEAR(std::abs(cauchy_solve(g, chi.R, z, fine) - chi.value(z)), 0.0, 1e-12) << z;
    if (std::abs(z) < 1.0) {
      EXPECT_NEAR(std::abs(cauchy_solve(g, chi.R, z, kPolar) - chi.value(z)), 0.0, 1e-12) << z;
    }
  }
}

TEST(CauchySolve, Linearity) {
  const BumpFunction sum({{1.0, 0, 0}, {Complex(1.0, 0.5), 1, 0}, {0.5, 0, 1}}, 1.0);
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.5, 0.5), Complex(1.5, -0.3)}) {
    const Complex a = cauchy_solve(kBumpA, z, kPolar) + cauchy_solve(kBumpB, z, kPolar);
    EXPECT_NEAR(std::abs(cauchy_solve(sum, z, kPolar) - a), 0.0, 1e-10);
    const Complex b = CauchyTransform(kBumpA)(z) + CauchyTransform(kBumpB)(z);
    EXPECT_NEAR(std::abs(CauchyTransform(sum)(z) - b), 0.0, 1e-10);
  }
}

TEST(CauchyTransform, AgreesWithPolarSolver) {
  std::mt19937_64 rng(6);
  const auto fine = QuadratureSpec::polar_gauss(64, 2048);
  for (const auto* g : {&kBumpA, &kBumpB, &kBumpC}) {
    const CauchyTransform ct(*g);
    for (int k = 0; k < 10; ++k) {
      const double R = g->support_radius();
      const Complex z(uniform_in(rng, -2.0 * R, 2.0 * R), uniform_in(rng, -2.0 * R, 2.0 * R));
      const Complex a = ct(z), b = cauchy_solve(*g, z, fine);
      EXPECT_NEAR(std::abs(a - b), 0.0, 1e-10 * (1.0 + std::abs(b))) << z;
    }
  }
}

TEST(CauchyTransform, DbarResidual) {
  for (const auto* g : {&kBumpA, &kBumpB, &kBumpC}) EXPECT_LE(dbar_residual(CauchyTransform(*g)), 1e-3);
}

TEST(CauchyTransform, FarFieldDecay) {
  // radial datum: f(z) = (1/(pi z)) int g exactly for |z| beyond the support
  const CauchyTransform ct(kBumpA);
  const PlanarRule rule = annulus_rule(0.0, 1.0, 64, 128);
  Complex integral = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) integral += rule.w[i] * kBumpA(Complex(rule.x[i], rule.y[i]));
  for (double x : {3.0, 10.0, 100.0}) {
    const Complex z(x, 0.5);
    EXPECT_NEAR(std::abs(ct(z) - integral / (kPi * z)), 0.0, 1e-12);
  }
}

TEST(JFunctional, Examples) {
  EXPECT_EQ(j_functional({BumpFunction({}, 1.0), Weight::constant(0.0), 2.0}, kPolar), 0.0);
  const double j = j_functional({kBumpA, Weight::constant(0.0), 2.0}, kPolar);
  EXPECT_NEAR(j, bump_sq_integral(), 1e-10);
  const Complex c(2.0, -1.0);
  const double jc = j_functional({kBumpB.scaled(c), Weight::abs_sq(), 1.5}, kPolar);
  const double jb = j_functional({kBumpB, Weight::abs_sq(), 1.5}, kPolar);
  EXPECT_NEAR(jc, std::norm(c) * jb, 1e-13 * jc);
}

TEST(DbarCheck, DegenerateZeroDatum) {
  const auto rep = check_dbar_bound({BumpFunction({}, 1.0), Weight::constant(0.0), 2.0}, Complex(0.2, 0.0), 0.5, kPolar);
  EXPECT_TRUE(rep.degenerate);
  EXPECT_NEAR(rep.lhs, kLogFloor, 1e-12 * std::abs(kLogFloor));
  EXPECT_EQ(rep.rhs, -std::numeric_limits<double>::infinity());
}

TEST(DbarCheck, OutsideSupport) {
  const auto rep = check_dbar_bound({kBumpA, Weight::constant(0.0), 2.0}, Complex(3.0, 0.0), 0.5, kPolar);
  EXPECT_FALSE(rep.degenerate);
  EXPECT_GE(rep.slack, 0.0);
  EXPECT_NEAR(rep.slack, rep.rhs - rep.lhs, 1e-15);
}

TEST(DbarCheck, RadiusViolation) {
  const DbarData d{kBumpA, Weight::constant(0.0), 2.0};
  EXPECT_EQ(kind_of([&] { check_dbar_bound(d, Complex(0.0, 0.0), 1.0, kPolar); }), ErrorKind::RadiusViolation);
  EXPECT_EQ(kind_of([&] { check_dbar_bound(d, Complex(0.0, 0.0), 0.0, kPolar); }), ErrorKind::RadiusViolation);
}

TEST(DbarCheck, RandomPointsAndChainSteps) {
  std::mt19937_64 rng(10);
  for (const auto* g : {&kBumpA, &kBumpB, &kBumpC}) {
    const DbarProblem prob({*g, Weight::constant(0.0), 2.0}, kPolar);
    EXPECT_GT(prob.j_value(), 0.0);
    double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
    for (int k = 0; k < 20; ++k) {
      const double rho = 3.0 * std::sqrt(unit_uniform(rng)), th = 2.0 * kPi * unit_uniform(rng);
      const Complex z = std::polar(rho, th);
      const double r = uniform_in(rng, 0.05, 0.95);
      const auto rep = prob.check(z, r, QuadratureSpec::polar_gauss(16, 32));
      EXPECT_GE(rep.slack, -1e-6) << z << " r " << r;
      EXPECT_GE(rep.jensen_step_slack, -1e-9);
      EXPECT_GE(rep.inclusion_step_slack, -1e-9);
      cmin = std::min(cmin, rep.const_a_used);
      cmax = std::max(cmax, rep.const_a_used);
    }
    EXPECT_TRUE(std::isfinite(cmin) && std::isfinite(cmax));
    EXPECT_LT(cmax - cmin, 5.0);
  }
}

TEST(DbarCheck, PremiseFallback) {
  // rhs uses J/a when the weighted estimate holds, the measured norm otherwise
  const DbarProblem prob({kBumpC, Weight::abs_sq(), 0.5}, kPolar);
  const auto rep = prob.check(Complex(0.5, 0.5), 0.4, QuadratureSpec::polar_gauss(16, 32));
  const double m = rep.premise_holds ? prob.j_value() / 0.5 : prob.weighted_norm_sq();
  const double bv = ball_mean(Weight::abs_sq(), CPoint{Complex(0.5, 0.5)}, 0.4, QuadratureSpec::polar_gauss(16, 32));
  const double bl = ball_mean(Weight::log1p_abs_sq(), CPoint{Complex(0.5, 0.5)}, 0.4, QuadratureSpec::polar_gauss(16, 32));
  const double rhs = 0.5 * bv + 0.25 * bl + std::log(1.0 / 0.4) - 0.5 * std::log(kPi) + 0.5 * std::log(m);
  EXPECT_NEAR(rep.rhs, rhs, 1e-12);
  EXPECT_GE(rep.slack, 0.0);
}
