#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <jbound/jensen.hpp>
#include <jbound/properties.hpp>

using namespace jbound;

namespace {

double coord(std::span<const double> x) { return x[0]; }

int clause_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolation) << e.what();
    return e.clause();
  }
  ADD_FAILURE() << "no exception";
  return -1;
}

// Table lookup of a per-atom value; atoms sit at x = 0, 1, 2, ...
ScalarFn table(std::vector<double> vals) {
  return [vals = std::move(vals)](std::span<const double> x) { return vals[static_cast<std::size_t>(x[0])]; };
}

std::vector<double> iota(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  return v;
}

}  // namespace

TEST(Integrate, Examples) {
  EXPECT_DOUBLE_EQ(integrate(MeasureSpace::discrete({0.0, 1.0}, {0.5, 0.5}), coord), 0.5);
  const auto square = MeasureSpace::lebesgue(RectRegion{{0.0, 0.0}, {1.0, 1.0}}, QuadratureSpec::polar_gauss(16, 16));
  EXPECT_NEAR(square.total_mass(), 1.0, 1e-14);
  EXPECT_NEAR(integrate(square, [](std::span<const double>) { return 3.25; }), 3.25, 1e-13);
  const auto disc = MeasureSpace::lebesgue(BallRegion{{0.0, 0.0}, 1.0}, QuadratureSpec::polar_gauss(16, 32));
  EXPECT_NEAR(disc.total_mass(), std::numbers::pi, 1e-13);
  EXPECT_NEAR(integrate(disc, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; }),
              std::numbers::pi / 2.0, 1e-13);
}

TEST(Integrate, MonteCarloIsSeeded) {
  const auto q = QuadratureSpec::monte_carlo(4000, 42);
  auto f = [](std::span<const double> x) { return std::exp(x[0]) * x[1] * x[1]; };
  const double a = integrate(MeasureSpace::lebesgue(BallRegion{{0.0, 0.0, 0.0}, 1.0}, q), f);
  const double b = integrate(MeasureSpace::lebesgue(BallRegion{{0.0, 0.0, 0.0}, 1.0}, q), f);
  EXPECT_EQ(a, b);
  const double c = integrate(MeasureSpace::lebesgue(BallRegion{{0.0, 0.0, 0.0}, 1.0}, QuadratureSpec::monte_carlo(4000, 43)), f);
  EXPECT_NE(a, c);
}

TEST(Integrate, InfiniteValues) {
  const auto ms = MeasureSpace::discrete({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0});
  const double inf = std::numeric_limits<double>::infinity();
  // zero-weight atom contributes nothing
  EXPECT_DOUBLE_EQ(integrate(ms, table({1.0, -inf, 2.0})), 3.0);
  EXPECT_EQ(integrate(ms, table({inf, 0.0, 2.0})), inf);
  try {
    integrate(ms, table({inf, 0.0, -inf}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonIntegrable);
  }
}

TEST(Measure, RejectsNegativeWeights) {
  EXPECT_THROW(MeasureSpace::discrete({0.0, 1.0}, {0.5, -0.5}), Error);
  EXPECT_THROW(MeasureSpace::discrete({0.0, 1.0}, {0.0, 0.0}), Error);
}

TEST(Jensen, Examples) {
  const auto ms = MeasureSpace::discrete({0.0, 1.0}, {0.5, 0.5});
  const auto a = jensen(ms, coord, ConvexFunction::power(2.0));
  EXPECT_DOUBLE_EQ(a.lhs, 0.25);
  EXPECT_DOUBLE_EQ(a.rhs, 0.5);
  EXPECT_TRUE(a.mean_in_domain);

  const auto b = jensen(MeasureSpace::discrete({-1.0, 1.0}, {0.5, 0.5}), coord, ConvexFunction::exponential(1.0));
  EXPECT_DOUBLE_EQ(b.lhs, 1.0);
  EXPECT_NEAR(b.rhs, std::cosh(1.0), 1e-15);

  const auto c = jensen(MeasureSpace::discrete({0.0, 1.0, 7.0}, {0.2, 0.3, 0.5}),
                        [](std::span<const double>) { return 0.75; }, ConvexFunction::exponential(3.0));
  EXPECT_NEAR(c.lhs, std::exp(2.25), 1e-12 * std::exp(2.25));
  EXPECT_NEAR(c.rhs, c.lhs, 1e-12 * (1.0 + c.lhs));
}

TEST(Jensen, Errors) {
  const auto ms = MeasureSpace::discrete({0.0, 1.0}, {0.5, 0.5});
  const auto phi = ConvexFunction::power(2.0, Interval::closed(0.0, 0.5));
  try {
    jensen(ms, coord, phi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainViolation);
  }
  EXPECT_THROW(jensen(MeasureSpace::discrete({0.0, 1.0}, {1.0, 1.0}), coord, phi), Error);
}

TEST(Jensen, RandomTrials) {
  const auto s = run_jensen_trials(10000, 12345);
  EXPECT_EQ(s.trials, 10000);
  EXPECT_EQ(s.violations, 0);
  EXPECT_GE(s.worst_relative_slack, -1e-9);
  EXPECT_LE(s.equality_max_error, 1e-12);
}

TEST(MeanBound, Examples) {
  const auto pair = MeasurePair::discrete({0.0, 1.0, 2.0}, {1.0, 2.0, 0.5}, {1.0, 2.0, 0.5});
  const auto v = table({0.3, -1.0, 4.0});
  const auto u = table({1.3, 0.0, 5.0});
  const auto r = mean_bound(pair, u, v, sup_inverse(ConvexFunction::exponential(1.0)));
  const double mean_v = (0.3 - 2.0 + 2.0) / 3.5;
  EXPECT_NEAR(r.mean_v, mean_v, 1e-15);
  EXPECT_NEAR(r.rhs, mean_v + 1.0, 1e-14);
  EXPECT_NEAR(r.mean_u, r.rhs, 1e-14);

  // mu on half the atoms, u - v >= 0
  const auto half = MeasurePair::discrete(iota(4), {1.0, 1.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0});
  const auto u2 = table({2.0, 0.5, 1.0, 3.0});
  const auto v2 = table({0.0, 0.0, 0.0, 0.0});
  const auto r2 = mean_bound(half, u2, v2, sup_inverse(ConvexFunction::power(1.0)));
  EXPECT_DOUBLE_EQ(r2.mean_u, 1.25);
  EXPECT_DOUBLE_EQ(r2.rhs, 6.5 / 2.0);
  EXPECT_GE(r2.rhs, r2.mean_u);
}

TEST(MeanBound, HypothesisClauses) {
  const auto zero = table({0.0, 0.0, 0.0});
  // (1)
  EXPECT_EQ(clause_of([] { MeasurePair::discrete({0.0, 1.0}, {2.0, 1.0}, {1.0, 1.0}); }), 1);
  EXPECT_EQ(clause_of([&] {
              mean_bound(MeasurePair::discrete(iota(3), {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), zero, zero,
                         sup_inverse(ConvexFunction::exponential(1.0)));
            }),
            1);
  // (3): u - v leaves dom Phi
  const auto narrow = sup_inverse(ConvexFunction::power(2.0, Interval::closed(-1.0, 1.0)));
  EXPECT_EQ(clause_of([&] {
              mean_bound(MeasurePair::discrete(iota(3), {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), table({0.0, 5.0, 0.0}),
                         zero, narrow);
            }),
            3);
  // (4): Phi(u - v) < 0 off the support of mu
  const auto dip = sup_inverse(ConvexFunction::piecewise_linear({{-2.0, 1.0}, {0.0, -1.0}, {2.0, 1.0}}));
  EXPECT_EQ(clause_of([&] {
              mean_bound(MeasurePair::discrete(iota(3), {1.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), table({1.0, 0.0, 0.0}),
                         zero, dip);
            }),
            4);
  // (4): argument outside im Phi
  const auto capped = sup_inverse(ConvexFunction::power(1.0, Interval::closed(0.0, 1.0)));
  EXPECT_EQ(clause_of([&] {
              mean_bound(MeasurePair::discrete(iota(3), {0.1, 0.1, 0.1}, {1.0, 1.0, 1.0}), table({1.0, 1.0, 1.0}),
                         zero, capped);
            }),
            4);
}

TEST(MeanBound, MonotoneInNu) {
  std::mt19937_64 rng(77);
  const auto si = sup_inverse(ConvexFunction::exponential(1.0));
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 3 + rng() % 8;
    std::vector<double> mu(m), nu(m), u(m), v(m);
    for (std::size_t i = 0; i < m; ++i) {
      mu[i] = unit_uniform(rng);
      nu[i] = mu[i] + (i % 2 ? unit_uniform(rng) : 0.0);
      u[i] = uniform_in(rng, -2.0, 2.0);
      v[i] = uniform_in(rng, -2.0, 2.0);
    }
    const auto a = mean_bound(MeasurePair::discrete(iota(m), mu, nu), table(u), table(v), si);
    std::vector<double> bigger = nu;
    bigger[rng() % m] += unit_uniform(rng);
    const auto b = mean_bound(MeasurePair::discrete(iota(m), mu, bigger), table(u), table(v), si);
    EXPECT_GE(b.rhs, a.rhs - 1e-15 * (1.0 + std::abs(a.rhs)));
    EXPECT_LE(a.mean_u, a.rhs + 1e-12);
  }
}

TEST(MeanBoundLebesgue, Examples) {
  const auto q = QuadratureSpec::polar_gauss(32, 64);
  const BallRegion disc{{0.0, 0.0}, 1.0};
  auto v = [](std::span<const double> x) { return x[0] + 0.5 * x[1] * x[1]; };
  const auto si = sup_inverse(ConvexFunction::exponential(1.0));
  const auto same = mean_bound_lebesgue(disc, disc, v, v, si, q);
  EXPECT_NEAR(same.rhs, same.mean_v + si.eval(1.0), 1e-14);
  EXPECT_NEAR(same.mean_v, 0.125, 1e-13);

  // u - v = |x|^2, X0 unit disc, X disc of radius 2:
  // int_{|x|<2} e^{|x|^2} = pi (e^4 - 1), mu(X0) = pi.
  auto zero = [](std::span<const double>) { return 0.0; };
  auto sq = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  const auto r = mean_bound_lebesgue(disc, BallRegion{{0.0, 0.0}, 2.0}, sq, zero, si, q);
  EXPECT_NEAR(r.mean_u, 0.5, 1e-13);
  EXPECT_NEAR(r.argument, std::expm1(4.0), 1e-9 * std::expm1(4.0));
  EXPECT_NEAR(r.rhs, std::log(std::expm1(4.0)), 1e-10);
  EXPECT_LE(r.mean_u, r.rhs);

  EXPECT_THROW(mean_bound_lebesgue(BallRegion{{0.0, 0.0}, 0.0}, disc, sq, zero, si, q), Error);
}

TEST(MeanBoundLebesgue, MatchesRestrictionBitForBit) {
  const auto q = QuadratureSpec::polar_gauss(24, 48);
  const BallRegion part{{0.5, 0.0}, 1.0}, whole{{0.0, 0.0}, 3.0};
  auto u = [](std::span<const double> x) { return std::sin(x[0]) + x[1]; };
  auto v = [](std::span<const double> x) { return 0.1 * x[0] * x[1]; };
  const auto si = sup_inverse(ConvexFunction::power(2.0));
  const auto a = mean_bound_lebesgue(part, whole, u, v, si, q);
  const auto b = mean_bound(MeasurePair::restriction(part, whole, q), u, v, si);
  EXPECT_EQ(a.rhs, b.rhs);
  EXPECT_EQ(a.argument, b.argument);
  EXPECT_EQ(a.mean_u, b.mean_u);
}

TEST(Separated, ExpUnitMassEqualsUnseparated) {
  const auto pair = MeasurePair::discrete(iota(3), {0.25, 0.5, 0.25}, {0.5, 0.5, 1.0});
  const auto u = table({0.1, 1.0, -0.5});
  const auto v = table({0.0, 0.3, 0.2});
  const auto a = separated_bound_exp(pair, u, v, 1.0);
  const auto b = mean_bound(pair, u, v, sup_inverse(ConvexFunction::exponential(1.0)));
  EXPECT_NEAR(a.rhs, b.rhs, 1e-15);
}

TEST(Separated, ExpConstantDifference) {
  const double e = std::exp(1.0);
  const auto pair = MeasurePair::discrete(iota(3), {e / 2.0, e / 2.0, 0.0}, {e / 2.0, e / 2.0, 2.0});
  const auto v = table({1.0, 3.0, -1.0});
  const auto r = separated_bound_exp(pair, v, v, 1.0);
  EXPECT_NEAR(r.rhs, 2.0 - 1.0 + std::log(e + 2.0), 1e-14);
}

TEST(Separated, PowerHolderForm) {
  // mean(u - v) <= mu(X)^(-1/2) (int |u - v|^2 dnu)^(1/2), both orientations
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng() % 10;
    std::vector<double> w(m), u(m), v(m);
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = unit_uniform(rng);
      u[i] = uniform_in(rng, -3.0, 3.0);
      v[i] = uniform_in(rng, -3.0, 3.0);
    }
    const auto pair = MeasurePair::discrete(iota(m), w, w);
    double mass = 0.0, l2 = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mass += w[i];
      l2 += w[i] * (u[i] - v[i]) * (u[i] - v[i]);
      mean += w[i] * (u[i] - v[i]);
    }
    mean /= mass;
    const double holder = std::sqrt(l2 / mass);
    const auto ab = separated_bound_power(pair, table(u), table(v), 2.0);
    const auto ba = separated_bound_power(pair, table(v), table(u), 2.0);
    EXPECT_LE(ab.penalty, holder + 1e-12);
    EXPECT_LE(ba.penalty, holder + 1e-12);
    EXPECT_LE(std::abs(mean), std::max(ab.penalty, ba.penalty) + 1e-12);
  }
}

TEST(Separated, EqualsUnseparatedForBothKinds) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng() % 10;
    std::vector<double> mu(m), nu(m), u(m), v(m);
    for (std::size_t i = 0; i < m; ++i) {
      mu[i] = unit_uniform(rng);
      nu[i] = mu[i] * (1.0 + unit_uniform(rng));
      u[i] = uniform_in(rng, -2.0, 2.0);
      v[i] = uniform_in(rng, -2.0, 2.0);
    }
    const auto pair = MeasurePair::discrete(iota(m), mu, nu);
    const double p = 1.0 + 2.0 * unit_uniform(rng);
    const auto sp = separated_bound_power(pair, table(u), table(v), p);
    const auto up = mean_bound(pair, table(u), table(v), sup_inverse(ConvexFunction::power(p)));
    EXPECT_NEAR(sp.rhs, up.rhs, 1e-12 * (1.0 + std::abs(up.rhs)));
    const auto se = separated_bound_exp(pair, table(u), table(v), p);
    const auto ue = mean_bound(pair, table(u), table(v), sup_inverse(ConvexFunction::exponential(p)));
    EXPECT_NEAR(se.rhs, ue.rhs, 1e-12 * (1.0 + std::abs(ue.rhs)));
    EXPECT_LE(ue.mean_u, ue.rhs + 1e-12);
  }
}
