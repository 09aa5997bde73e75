#include <gtest/gtest.h>

#include <cmath>

#include "serieslab/limits/limits.hpp"

using namespace serieslab;
using namespace serieslab::limits;

namespace {

std::vector<Sample> seq(int j0, int j1, double (*f)(int)) {
  std::vector<Sample> s;
  for (int j = j0; j <= j1; ++j) s.push_back({ExtScalar(static_cast<long>(j)), ExtScalar(static_cast<long double>(f(j)))});
  return s;
}

}  // namespace

TEST(Grid, Examples) {
  const auto g = make_grid(GridSchedule::geometric(10, 10, 5));
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g[0], ExtScalar(10L));
  EXPECT_EQ(g[4], ExtScalar(100000L));

  const auto t = make_grid(GridSchedule::tower(2, 2, 1, 3));
  ASSERT_EQ(t.size(), 3u);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(t[j], ExtScalar::tower(2, numeric::Real(static_cast<long>(2 + j), 256)));

  const auto d = make_grid(GridSchedule::tower(4, 1.5, 1, 8));
  EXPECT_EQ(numeric::iter_ln(4, d[0]).to_double(), 1.5);
  EXPECT_EQ(GridSchedule::parse("tower:4,1.5,1,8").to_string(), "tower:4,1.5,1,8");
  EXPECT_EQ(GridSchedule::parse("geometric:1000,10,12").count, 12);
  EXPECT_THROW(GridSchedule::parse("geometric:10,1,5"), InvalidArgument);  // validated on use
}

TEST(Grid, BadScheduleRejected) {
  EXPECT_THROW(make_grid(GridSchedule::geometric(10, 1, 5)), InvalidArgument);
  EXPECT_THROW(GridSchedule::parse("spiral:1,2"), InvalidArgument);
}

TEST(Estimate, Constant) {
  const auto e = estimate_limit(seq(1, 10, [](int) { return 5.0; }));
  EXPECT_TRUE(e.converged());
  EXPECT_EQ(e.value.to_double(), 5.0);
  EXPECT_TRUE(e.uncertainty.is_zero());
}

TEST(Estimate, HarmonicTail) {
  const auto e = estimate_limit(seq(8, 64, [](int j) { return -1.0 + 3.0 / j; }));
  EXPECT_TRUE(e.converged());
  EXPECT_NEAR(e.value.to_double(), -1.0, 1e-3);
  EXPECT_LE(e.samples_used, 64u);
}

TEST(Estimate, Alternating) {
  const auto e = estimate_limit(seq(1, 20, [](int j) { return j % 2 ? -1.0 : 1.0; }));
  EXPECT_EQ(e.status, Status::NotConverged);
}

TEST(Estimate, Divergence) {
  EXPECT_EQ(estimate_limit(seq(1, 12, [](int j) { return std::exp(static_cast<double>(j)); })).status,
            Status::DivergedPos);
  EXPECT_EQ(estimate_limit(seq(8, 40, [](int j) { return -1.0 * j; })).status, Status::DivergedNeg);
  EXPECT_EQ(estimate_limit(seq(8, 40, [](int j) { return 1.0 * j; })).status, Status::DivergedPos);
}

TEST(Estimate, TooFewSamples) {
  EXPECT_THROW(estimate_limit(seq(1, 7, [](int) { return 1.0; })), InvalidArgument);
}

TEST(Estimate, SlowLogConvergence) {
  // L + c / ln n on a geometric grid: only Richardson in 1/ln n gets there.
  std::vector<Sample> s;
  const auto g = make_grid(GridSchedule::geometric(1000, 10, 12));
  for (const auto& n : g) s.push_back({n, ExtScalar(-1.0L + 2.0L / std::log(n.to_long_double()))});
  const auto e = estimate_limit(s);
  EXPECT_TRUE(e.converged());
  EXPECT_EQ(e.method, Method::Richardson);
  EXPECT_NEAR(e.value.to_double(), -1.0, 1e-9);
}

TEST(Properties, GeometricConsistency) {
  for (double rho : {0.5, -0.5, 0.8, 0.9}) {
    for (double c : {1.0, -3.0}) {
      const int count = 12;
      std::vector<Sample> s;
      for (int j = 0; j < count; ++j)
        s.push_back({ExtScalar(static_cast<long>(j + 1)), ExtScalar(static_cast<long double>(2.0 + c * std::pow(rho, j)))});
      const auto e = estimate_limit(s);
      EXPECT_NEAR(e.value.to_double(), 2.0, 10 * std::fabs(c * std::pow(rho, count))) << rho << " " << c;
    }
  }
}

TEST(Properties, Idempotence) {
  const auto e = estimate_limit(seq(8, 64, [](int j) { return -1.0 + 3.0 / j; }));
  std::vector<Sample> s;
  for (int j = 0; j < 10; ++j) s.push_back({ExtScalar(static_cast<long>(j + 1)), e.value});
  const auto f = estimate_limit(s);
  EXPECT_EQ(f.value, e.value);
  EXPECT_TRUE(f.uncertainty.is_zero());
}

TEST(LimsupLiminf, Oscillator) {
  const auto s = seq(8, 64, [](int j) { return (j % 2 ? -1.0 : 1.0) * (1.0 + 1.0 / j); });
  const auto [sup, inf] = estimate_limsup_liminf(s);
  EXPECT_TRUE(sup.converged());
  EXPECT_TRUE(inf.converged());
  EXPECT_NEAR(sup.value.to_double(), 1.0, 1e-2);
  EXPECT_NEAR(inf.value.to_double(), -1.0, 1e-2);
}

TEST(LimsupLiminf, DegenerateAndDivergent) {
  const auto s = seq(8, 64, [](int j) { return -1.0 + 3.0 / j; });
  const auto [sup, inf] = estimate_limsup_liminf(s);
  const auto lim = estimate_limit(s);
  EXPECT_NEAR(sup.value.to_double(), lim.value.to_double(), 1e-3);
  EXPECT_NEAR(inf.value.to_double(), lim.value.to_double(), 1e-3);

  const auto up = seq(8, 64, [](int j) { return 1.0 * j * j; });
  const auto [a, b] = estimate_limsup_liminf(up);
  EXPECT_EQ(a.status, Status::DivergedPos);
  EXPECT_EQ(b.status, Status::DivergedPos);
}

TEST(LimsupLiminf, OrderIsKept) {
  for (int shift = 0; shift < 5; ++shift) {
    std::vector<Sample> s;
    for (int j = 8; j < 40; ++j)
      s.push_back({ExtScalar(static_cast<long>(j)),
                   ExtScalar(static_cast<long double>(std::sin(j + shift) / j - 0.5))});
    const auto [sup, inf] = estimate_limsup_liminf(s);
    EXPECT_GE(compare(sup.value, inf.value), 0);
  }
}
