#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <jbound/convex.hpp>
#include <jbound/properties.hpp>

using namespace jbound;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

ConvexFunction remark_function() {
  return ConvexFunction::piecewise_linear({{-1.0, 1.0}, {0.0, 0.0}, {3.0, 3.0}}, {{-1.0, 2.0}});
}

// Max of the affine pieces through consecutive breakpoints.
double max_of_lines(const std::vector<std::pair<double, double>>& pts, double t) {
  double best = -kInf;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double s = (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
    best = std::max(best, pts[i - 1].second + s * (t - pts[i - 1].first));
  }
  return best;
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

}  // namespace

TEST(Interval, RejectsReversedAndClosedInfinity) {
  EXPECT_THROW(Interval(2.0, 1.0, true, true), Error);
  EXPECT_THROW(Interval(ExtReal::neg_inf(), 0.0, true, false), Error);
  const Interval iv(0.0, 1.0, false, true);
  EXPECT_FALSE(iv.contains(0.0));
  EXPECT_TRUE(iv.contains(1.0));
  EXPECT_TRUE(Interval::real_line().contains(1e300));
  EXPECT_FALSE(Interval::real_line().contains(ExtReal::pos_inf()));
}

TEST(ExtendedReal, TotalOrder) {
  EXPECT_LT(ExtReal::neg_inf(), ExtReal(-1e308));
  EXPECT_LT(ExtReal(1e308), ExtReal::pos_inf());
  EXPECT_EQ(ExtReal::pos_inf(), ExtReal::pos_inf());
}

TEST(Eval, Examples) {
  EXPECT_EQ(ConvexFunction::power(2.0).eval(-3.0), 0.0);
  EXPECT_EQ(ConvexFunction::power(2.0).eval(3.0), 9.0);
  EXPECT_EQ(ConvexFunction::exponential(2.0).eval(0.0), 1.0);
  EXPECT_EQ(remark_function().eval(-1.0), 2.0);
  EXPECT_EQ(remark_function().eval(-0.5), 0.5);
  EXPECT_EQ(remark_function().eval(2.0), 2.0);
}

TEST(Eval, ExponentialExtendedEnds) {
  const auto e = ConvexFunction::exponential(1.0);
  EXPECT_EQ(e(ExtReal::neg_inf()).value(), 0.0);
  EXPECT_TRUE(e(ExtReal::pos_inf()).is_pos_inf());
  EXPECT_EQ(kind_of([] { ConvexFunction::power(2.0)(ExtReal::neg_inf()); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { remark_function().eval(3.5); }), ErrorKind::DomainError);
}

TEST(Construction, RejectsInvalidRules) {
  EXPECT_THROW(ConvexFunction::power(0.5), Error);
  EXPECT_THROW(ConvexFunction::exponential(0.0), Error);
  EXPECT_THROW(ConvexFunction::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}}), Error);  // concave kink
  EXPECT_THROW(ConvexFunction::piecewise_linear({{0.0, 0.0}, {0.0, 1.0}}), Error);
  EXPECT_THROW(ConvexFunction::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}}, {{0.5, 3.0}}), Error);
  EXPECT_THROW(ConvexFunction::piecewise_linear({{0.0, 0.0}, {1.0, 1.0}}, {{0.0, -1.0}}), Error);
}

TEST(Classify, Examples) {
  const auto c = classify(ConvexFunction::constant(5.0, Interval::closed(0.0, 1.0)));
  EXPECT_EQ(c.kind, ConditionCase::Constant);
  EXPECT_EQ(sup_inverse(ConvexFunction::constant(5.0, Interval::closed(0.0, 1.0))).eval(5.0), 1.0);

  const auto e = classify(ConvexFunction::exponential(1.0));
  EXPECT_EQ(e.kind, ConditionCase::StrictlyIncreasing);
  ASSERT_TRUE(e.image);
  EXPECT_EQ(e.image->lo().value(), 0.0);
  EXPECT_FALSE(e.image->lo_closed());
  EXPECT_TRUE(e.image->hi().is_pos_inf());

  const auto p = classify(ConvexFunction::power(2.0));
  EXPECT_EQ(p.kind, ConditionCase::BoundedBelowWithTmax);
  ASSERT_TRUE(p.t_max);
  EXPECT_NEAR(*p.t_max, 0.0, 1e-12);
  EXPECT_TRUE(p.image->lo_closed());
  EXPECT_EQ(p.image->lo().value(), 0.0);

  EXPECT_EQ(classify(remark_function()).kind, ConditionCase::BoundedBelowWithTmax);
}

TEST(Classify, FailingShapes) {
  // Decreasing on its whole domain.
  EXPECT_EQ(classify(ConvexFunction::piecewise_linear({{0.0, 1.0}, {1.0, 0.0}})).kind, ConditionCase::Fails);
  // Left end value above the right branch on a half-open domain.
  const auto bad = ConvexFunction::piecewise_linear({{-1.0, 1.0}, {0.0, 0.0}, {3.0, 3.0}}, {{-1.0, 5.0}},
                                                    Interval(-1.0, 3.0, true, false));
  EXPECT_EQ(classify(bad).kind, ConditionCase::Fails);
  EXPECT_THROW(sup_inverse(bad), Error);
  // Equal end values: fine when the right end is closed, not when it is open.
  EXPECT_NE(classify(ConvexFunction::piecewise_linear({{-3.0, 3.0}, {0.0, 0.0}, {3.0, 3.0}})).kind,
            ConditionCase::Fails);
  EXPECT_EQ(classify(ConvexFunction::piecewise_linear({{-3.0, 3.0}, {0.0, 0.0}, {3.0, 3.0}}, {},
                                                      Interval(-3.0, 3.0, true, false)))
                .kind,
            ConditionCase::Fails);
}

TEST(Classify, TmaxMatchesDenseGrid) {
  std::mt19937_64 rng(101);
  int valleys = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto phi = random_pwl_convex(rng);
    const auto rep = classify(phi);
    if (rep.kind != ConditionCase::BoundedBelowWithTmax) continue;
    const double lo = phi.domain().lo().value(), hi = phi.domain().hi().value();
    const int n = 200001;
    const double h = (hi - lo) / (n - 1);
    double best = kInf, arg = lo;
    for (int i = 0; i < n; ++i) {
      const double t = std::min(lo + h * i, hi);
      const double v = phi.eval(t);
      if (v <= best + 1e-12) {
        if (v < best - 1e-12) best = v;
        arg = t;
      }
    }
    ASSERT_TRUE(rep.t_max);
    EXPECT_NEAR(*rep.t_max, arg, 2.0 * h) << "trial " << trial;
    ++valleys;
  }
  EXPECT_GT(valleys, 20);
}

TEST(SupInverse, Examples) {
  EXPECT_DOUBLE_EQ(sup_inverse(ConvexFunction::power(2.0)).eval(4.0), 2.0);
  EXPECT_DOUBLE_EQ(sup_inverse(ConvexFunction::exponential(2.0)).eval(1.0), 0.0);
  const auto si = sup_inverse(remark_function());
  EXPECT_NEAR(si.eval(2.0), 2.0, 1e-12);
  for (double y = 0.0; y <= 3.0; y += 0.125) EXPECT_NEAR(si.eval(y), y, 1e-12) << y;
  EXPECT_NEAR(si.eval(0.0), 0.0, 1e-12);
}

TEST(SupInverse, AtFlatMinimumGivesRightEnd) {
  const auto si = sup_inverse(ConvexFunction::power(3.0));
  EXPECT_NEAR(si.eval(0.0), 0.0, 1e-12);
  const auto flat = sup_inverse(ConvexFunction::piecewise_linear({{-2.0, 1.0}, {-1.0, 0.0}, {1.0, 0.0}, {2.0, 2.0}}));
  EXPECT_NEAR(flat.eval(0.0), 1.0, 1e-12);
  EXPECT_NEAR(flat.eval(1.0), 1.5, 1e-12);
}

TEST(SupInverse, RejectsOutsideImage) {
  const auto si = sup_inverse(ConvexFunction::exponential(1.0));
  EXPECT_TRUE(si(ExtReal(0.0)).is_neg_inf());
  EXPECT_THROW(si.eval(-1.0), Error);
}

TEST(SupInverse, BruteForcePiecewiseLinear) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::pair<double, double>> pts;
    const auto phi = random_pwl_convex(rng);
    const auto& rule = std::get<PiecewiseLinearRule>(phi.rule());
    pts = rule.points;
    const auto rep = classify(phi);
    if (rep.kind == ConditionCase::Fails) continue;
    const auto si = sup_inverse(phi);
    const double lo = pts.front().first, hi = pts.back().first;
    const int n = 100001;
    const double h = (hi - lo) / (n - 1);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = max_of_lines(pts, lo + h * i);
    for (int k = 0; k < 20; ++k) {
      const double y = random_in_interval(rng, *rep.image);
      double t_grid = -kInf;
      // band width = local grid increment
      for (int i = 0; i < n; ++i) {
        const double tol = std::abs(vals[i] - vals[i == 0 ? 1 : i - 1]);
        if (std::abs(vals[i] - y) <= tol) t_grid = lo + h * i;
      }
      ASSERT_TRUE(std::isfinite(t_grid));
      EXPECT_NEAR(si.eval(y), t_grid, 2.0 * h) << "trial " << trial << " y " << y;
      ++checked;
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(SupInverse, PropertyChecks) {
  std::vector<ConvexFunction> fns = {ConvexFunction::power(1.0), ConvexFunction::power(2.5),
                                     ConvexFunction::exponential(0.5), ConvexFunction::affine(2.0, -1.0),
                                     remark_function(), ConvexFunction::constant(1.0, Interval::closed(-1.0, 4.0))};
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    auto phi = random_pwl_convex(rng);
    if (classify(phi).kind != ConditionCase::Fails) fns.push_back(phi);
  }
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const auto chk = check_sup_inverse(sup_inverse(fns[i]), 1000, 17 + i);
    EXPECT_TRUE(chk.ok()) << i << ": mono " << chk.monotone_violations << " conc " << chk.concavity_violations
                          << " rt " << chk.roundtrip_max_error;
    EXPECT_EQ(chk.pairs, 1000);
  }
}

TEST(ConvexFunction, MidpointConvexity) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto phi = random_pwl_convex(rng);
    const double lo = phi.domain().lo().value(), hi = phi.domain().hi().value();
    for (int k = 0; k < 50; ++k) {
      const double a = uniform_in(rng, lo, hi), b = uniform_in(rng, lo, hi);
      EXPECT_LE(phi.eval(0.5 * (a + b)), 0.5 * (phi.eval(a) + phi.eval(b)) + 1e-12);
    }
  }
}

TEST(UpperCondition, Examples) {
  auto root = [](double y) { return std::sqrt(y); };
  const std::vector<std::pair<double, double>> s1 = {{4.0, 9.0}};
  const auto p = check_upper_condition(sup_inverse(ConvexFunction::power(2.0)), root, root, UpperKind::Power, s1);
  EXPECT_TRUE(p.holds);
  EXPECT_NEAR(p.worst_slack, 0.0, 1e-15);

  auto ln = [](double y) { return std::log(y); };
  const std::vector<std::pair<double, double>> s2 = {{std::exp(1.0), std::exp(2.0)}};
  const auto e = check_upper_condition(sup_inverse(ConvexFunction::exponential(1.0)), ln, ln, UpperKind::Log, s2);
  EXPECT_TRUE(e.holds);
  EXPECT_NEAR(e.worst_slack, 0.0, 1e-14);

  auto shifted = [](double y) { return std::log(y) + 1.0; };
  const std::vector<std::pair<double, double>> s3 = {{0.5, 3.0}, {2.0, 7.0}, {10.0, 0.01}};
  const auto s = check_upper_condition(sup_inverse(ConvexFunction::exponential(1.0)), ln, shifted, UpperKind::Log, s3);
  EXPECT_TRUE(s.holds);
  EXPECT_GE(s.worst_slack, 1.0 - 1e-12);
  EXPECT_EQ(s.checked, 3u);
}

TEST(UpperCondition, ProductOutsideImage) {
  auto root = [](double y) { return std::sqrt(y); };
  const std::vector<std::pair<double, double>> bad = {{2.0, -1.0}};
  EXPECT_EQ(kind_of([&] {
              check_upper_condition(sup_inverse(ConvexFunction::power(2.0)), root, root, UpperKind::Power, bad);
            }),
            ErrorKind::DomainError);
}

TEST(UpperCondition, DetectsViolation) {
  auto half = [](double y) { return 0.5 * std::log(y); };
  const std::vector<std::pair<double, double>> s = {{10.0, 10.0}};
  EXPECT_FALSE(check_upper_condition(sup_inverse(ConvexFunction::exponential(1.0)), half, half, UpperKind::Log, s).holds);
}
