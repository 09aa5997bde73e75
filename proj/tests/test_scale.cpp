#include <gtest/gtest.h>

#include <cmath>

#include "serieslab/scale/scale.hpp"

using namespace serieslab;
using namespace serieslab::scale;
using numeric::ExtScalar;
using numeric::Real;

namespace {

ExtScalar X(const char* s) { return ExtScalar::parse(s); }

Real R(const char* s) { return Real::parse(s, 256); }

std::vector<ExtScalar> geometric(long double start, long double ratio, int count) {
  std::vector<ExtScalar> g;
  for (int i = 0; i < count; ++i) g.emplace_back(start * std::pow(ratio, static_cast<long double>(i)));
  return g;
}

}  // namespace

TEST(Delta, Examples) {
  EXPECT_EQ(ScaleFn::identity().delta(X("123456")), ExtScalar(1L));

  // 256-bit direct differences at a still-representable n.
  const ExtScalar n = X("1e6");
  const Real n1 = R("1000001"), n0 = R("1000000");
  const Real direct1 = log(n1) - log(n0);
  const ExtScalar d1 = ScaleFn::iter_log(1).delta(n);
  EXPECT_LT(abs((d1.to_real() - direct1) / direct1).to_double(), 1e-60);
  EXPECT_LT(abs(d1.to_real() - R("9.99999500000333333083333533333e-7")).to_double(), 1e-35);

  const Real direct2 = log(log(n1)) - log(log(n0));
  const ExtScalar d2 = ScaleFn::iter_log(2).delta(n);
  EXPECT_LT(abs((d2.to_real() - direct2) / direct2).to_double(), 1e-60);
  EXPECT_LT(abs(d2.to_real() - R("7.23823748397551165315268832658e-8")).to_double(), 1e-36);

  const ExtScalar d3 = ScaleFn::power(expr::Rational(1, 2)).delta(X("9"));
  EXPECT_LT(std::fabs(d3.to_double() - (std::sqrt(10.0) - 3.0)), 1e-15);
}

TEST(Delta, TowerScaleIsPositive) {
  for (int k = 1; k <= 4; ++k) {
    const ExtScalar d = ScaleFn::iter_log(k).delta(ExtScalar::tower(4, R("2")));
    EXPECT_GT(d.sign(), 0);
    EXPECT_TRUE(d.is_reciprocal());
  }
}

TEST(Delta, Telescopes) {
  for (auto w : {ScaleFn::iter_log(1), ScaleFn::iter_log(2), ScaleFn::iter_log(3), ScaleFn::power(expr::Rational(3, 2))}) {
    const long a = 1000, b = 1400;
    ExtScalar s(0L);
    for (long i = a; i < b; ++i) s = s + w.delta(ExtScalar(i));
    const ExtScalar direct = w.value(ExtScalar(b)) - w.value(ExtScalar(a));
    EXPECT_LE(abs(s - direct).to_double(), std::ldexp(1.0, 8 - 256) * w.value(ExtScalar(b)).to_double()) << w.name();
  }
}

TEST(Delta, AsymptoticRatio) {
  // delta(ln_(k)) ~ 1/(n ln n ... ln_(k-1) n) along a tower grid.
  for (int k = 2; k <= 4; ++k) {
    const ScaleFn w = ScaleFn::iter_log(k);
    double prev = 1e300;
    for (const char* r : {"2", "2.5", "3", "4"}) {
      const ExtScalar n = ExtScalar::tower(2, R(r));
      ExtScalar prod = n, l = n;
      for (int i = 1; i < k; ++i) {
        l = numeric::ext_ln(l);
        prod = prod * l;
      }
      const double dev = std::fabs((w.delta(n) * prod).to_double() - 1.0);
      EXPECT_LT(dev, prev);
      prev = dev;
    }
    EXPECT_LT(prev, 1e-20);
  }
}

TEST(Delta, LogDeltaSplit) {
  for (auto w : {ScaleFn::iter_log(1), ScaleFn::iter_log(3), ScaleFn::power(expr::Rational(2)),
                 ScaleFn::power(expr::Rational(1, 3))}) {
    for (const char* s : {"50", "1e4", "1e30"}) {
      const ExtScalar n = X(s);
      const ExtScalar direct = numeric::ext_ln(w.delta(n));
      EXPECT_LT(abs(w.log_delta(n) - direct).to_double(), 1e-60) << w.name() << " at " << s;
    }
  }
  // At tower scale the correction vanishes and the main part is exact.
  const ExtScalar n = ExtScalar::tower(3, R("2"));
  EXPECT_TRUE(ScaleFn::iter_log(2).log_delta_correction(n).is_zero());
}

TEST(Delta, CustomCancellationGuard) {
  const ScaleFn w = ScaleFn::from_text("n + ln(n)");
  EXPECT_EQ(w.kind(), ScaleFn::Kind::Custom);
  const ExtScalar d = w.delta(X("100"));
  EXPECT_NEAR(d.to_double(), 1.0 + std::log(101.0 / 100.0), 1e-14);
  EXPECT_THROW(w.delta(X("1e200")), CancellationError);
}

TEST(Inverse, Examples) {
  EXPECT_EQ(ScaleFn::identity().inverse(ExtScalar(42L)), ExtScalar(42L));
  const ExtScalar t = ScaleFn::iter_log(2).inverse(ExtScalar(3L));
  EXPECT_EQ(t, ExtScalar::tower(2, R("3")));
  EXPECT_LT(std::fabs(ScaleFn::power(expr::Rational(2)).inverse(ExtScalar(9L)).to_double() - 3.0), 1e-60);
  const ScaleFn c = ScaleFn::from_text("n + ln(n)");
  const ExtScalar x(1000L);
  EXPECT_LT(std::fabs((c.value(c.inverse(x)) - x).to_double()), 1e-50);
  EXPECT_THROW(ScaleFn::power(expr::Rational(2)).inverse(ExtScalar(-1L)), RangeError);
}

TEST(Assumptions, CatalogAndCustom) {
  const auto grid = geometric(10, 10, 8);
  EXPECT_TRUE(ScaleFn::iter_log(1).check_assumptions(grid).proved);
  try {
    // 2^n, written without an n-dependent exponent
    ScaleFn::from_text("exp(n*ln(2))").check_assumptions(geometric(2, 2, 8));
    FAIL();
  } catch (const AssumptionViolation& v) {
    EXPECT_EQ(v.which(), 'b');
  }
  try {
    ScaleFn::from_text("(n - 10)^2").check_assumptions(geometric(1, 1.5, 10));
    FAIL();
  } catch (const AssumptionViolation& v) {
    EXPECT_EQ(v.which(), 'a');
  }
  const auto ok = ScaleFn::from_text("n + ln(n)").check_assumptions(grid);
  EXPECT_FALSE(ok.proved);
  EXPECT_EQ(ok.increments.size(), 8u);
  EXPECT_THROW(ScaleFn::iter_log(1).check_assumptions(geometric(10, 10, 5)), InvalidArgument);
}

TEST(Scale, TextForms) {
  EXPECT_EQ(ScaleFn::from_text("ln").name(), "ln");
  EXPECT_EQ(ScaleFn::from_text("lnln(n)").k(), 2);
  EXPECT_EQ(ScaleFn::from_text("log_5").name(), "log_5");
  EXPECT_EQ(ScaleFn::from_text("n^0.5").kind(), ScaleFn::Kind::PowerOfN);
  EXPECT_EQ(ScaleFn::from_text("n").kind(), ScaleFn::Kind::Identity);
  EXPECT_EQ(ScaleFn::iter_log(3).n0(), 16);
}
