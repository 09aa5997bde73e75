#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "serieslab/analysis/corpus.hpp"
#include "serieslab/oracle/oracle.hpp"

using namespace serieslab;
using namespace serieslab::oracle;
using analysis::Decision;
using expr::Rational;

namespace {

Sequence S(const char* text) { return Sequence::from_text(text); }

RatePrediction rate(RateTemplate t, double parameter, ScaleFn w = ScaleFn::identity(), int depth = 1) {
  RatePrediction r;
  r.tmpl = t;
  r.parameter = numeric::ExtScalar::from_real(numeric::Real::parse(std::to_string(parameter), 64));
  r.w = w;
  r.log_depth = depth;
  return r;
}

}  // namespace

TEST(PartialSum, SmallExact) {
  // 1968329/1270080
  const SumResult r = partial_sum(S("1/n^2"), 10);
  EXPECT_NEAR(static_cast<double>(r.value), 1.5497677311665406904, 1e-17);
  EXPECT_EQ(r.n_terms, 10);
  EXPECT_EQ(partial_sum(S("1"), 1).value, 1);
}

TEST(PartialSum, RoundoffInvariant) {
  for (long long N : {1LL, 10LL, 1000LL, 100000LL}) {
    for (Method m : {Method::Compensated, Method::Pairwise}) {
      const SumResult r = partial_sum(S("1/n^2"), N, {100'000'000, m});
      EXPECT_LE(r.estimated_roundoff, N * 2 * kEps * r.value);
      EXPECT_GT(r.estimated_roundoff, 0);
    }
  }
}

TEST(PartialSum, MethodsAgree) {
  for (const auto& e : analysis::corpus()) {
    const Sequence s = e.sequence();
    const SumResult a = partial_sum(s, 300'000, {100'000'000, Method::Compensated});
    const SumResult b = partial_sum(s, 300'000, {100'000'000, Method::Pairwise});
    EXPECT_LE(std::fabs(a.value - b.value), a.estimated_roundoff + b.estimated_roundoff) << e.name;
  }
}

TEST(PartialSum, IncreasingAndIntegralMatch) {
  const Sequence s = S("1/(n*ln(n))");
  const auto r = partial_sums(s, {100'000, 1'000'000, 10, 1000});
  ASSERT_EQ(r.size(), 4u);
  for (std::size_t k = 0; k + 1 < r.size(); ++k) EXPECT_LT(r[k].value, r[k + 1].value);
  EXPECT_EQ(r[0].last, 10);
  // 256-bit direct sum over (1e5, 1e6]
  EXPECT_NEAR(static_cast<double>(r[3].value - r[2].value), 0.182321158691459774, 1e-15);
  EXPECT_NEAR(static_cast<double>(r[3].value - r[2].value), std::log(std::log(1e6)) - std::log(std::log(1e5)), 1e-6);
}

TEST(PartialSum, Errors) {
  EXPECT_THROW(partial_sum(S("1/n^2"), 2'000, {1'000, Method::Compensated}), BudgetExceeded);
  EXPECT_THROW(partial_sum(S("1/(n*ln(n))"), 1), InvalidArgument);
  EXPECT_NO_THROW(partial_sum(S("1/n^2"), 1'000, {1'000, Method::Compensated}));
}

TEST(PartialSum, ChunkBoundariesDoNotShift) {
  const Sequence s = S("1/n^2");
  const long double whole = partial_sum(s, 3 * kChunk + 17).value;
  const auto split = partial_sums(s, {kChunk - 5, 2 * kChunk + 3, 3 * kChunk + 17});
  EXPECT_NEAR(static_cast<double>(whole - split.back().value), 0, 1e-18);
  EXPECT_EQ(partial_sum(s, 3 * kChunk + 17).value, whole);
}

TEST(TailSum, Examples) {
  // trigamma(1e4) - trigamma(1e6 + 1)
  const SumResult w = tail_sum(S("1/n^2"), 10'000, 1'000'000, false);
  EXPECT_NEAR(static_cast<double>(w.value), 9.9005000666666499667e-5, 1e-18);
  EXPECT_FALSE(w.remainder);

  // trigamma(1e4)
  const SumResult t = tail_sum(S("1/n^2"), 10'000, 1'000'000);
  ASSERT_TRUE(t.remainder);
  EXPECT_NEAR(static_cast<double>(t.value), 1.0000500016666666633e-4, 1e-16);
  EXPECT_LE(std::fabs(static_cast<double>(t.value) - 1.0000500016666666633e-4), t.truncation_bound);

  // Hurwitz zeta(3/2, 1e4)
  const SumResult h = tail_sum(S("n^(-3/2)"), 10'000, 1'000'000);
  EXPECT_NEAR(static_cast<double>(h.value), 0.020000500012499999982, 1e-12);

  const SumResult one = tail_sum(S("1/n^2"), 99, 100, false);
  EXPECT_EQ(one.value, 1.0L / (99.0L * 99) + 1.0L / (100.0L * 100));
  EXPECT_EQ(one.n_terms, 2);
  EXPECT_THROW(tail_sum(S("1/n^2"), 100, 100), InvalidArgument);
  EXPECT_THROW(tail_sum(S("1/n^2"), 10, 10'000, true, {1'000, Method::Compensated}), BudgetExceeded);
}

TEST(TailSum, CallablesHaveNoRemainder) {
  const auto& e = analysis::corpus_entry("oscillating-cubic");
  const SumResult r = tail_sum(e.sequence(), 1'000, 100'000);
  EXPECT_FALSE(r.remainder);
  EXPECT_GT(r.value, 0);
}

TEST(SlopeCheck, SlowLog) {
  const FitReport r = slope_check(S("1/(n*ln(n))"), rate(RateTemplate::SlowLog, 1, ScaleFn::iter_log(1)));
  EXPECT_EQ(r.status, FitStatus::Pass) << r.message;
  ASSERT_EQ(r.estimates.size(), 3u);
  for (long double e : r.estimates) EXPECT_NEAR(static_cast<double>(e), 1, 0.02);
  EXPECT_LT(std::fabs(r.estimates[2] - 1), std::fabs(r.estimates[0] - 1));

  const FitReport wrong = slope_check(S("1/(n*ln(n))"), rate(RateTemplate::SlowLog, 2, ScaleFn::iter_log(1)));
  EXPECT_EQ(wrong.status, FitStatus::Fail);
}

TEST(SlopeCheck, Precise) {
  const FitReport a = slope_check(S("1/n^2"), rate(RateTemplate::PreciseTail, -2), {10'000, 100'000, 1'000'000}, 0.001);
  EXPECT_EQ(a.status, FitStatus::Pass) << a.message;
  EXPECT_NEAR(static_cast<double>(a.estimates[0]), 1, 1e-3);

  const FitReport b = slope_check(S("n^(-1/2)"), rate(RateTemplate::PrecisePartial, -0.5),
                                  {10'000, 100'000, 1'000'000}, 0.001);
  EXPECT_EQ(b.status, FitStatus::Pass) << b.message;
  EXPECT_NEAR(static_cast<double>(b.points.back().sum), 1998.5401454911487465, 1e-9);
}

TEST(SlopeCheck, LogTemplates) {
  const FitReport a = slope_check(S("1/(n*ln(n)^3)"), rate(RateTemplate::LogRatioTail, -2, ScaleFn::iter_log(1)),
                                  {10'000, 100'000, 1'000'000});
  EXPECT_EQ(a.status, FitStatus::Pass) << a.message;

  const FitReport d = slope_check(S("1/(n*ln(n)*lnln(n))"), rate(RateTemplate::LogLogPartial, 1, ScaleFn::iter_log(1), 3));
  EXPECT_EQ(d.status, FitStatus::InsufficientSignal);
  EXPECT_STREQ(to_string(d.status), "unverifiable-at-scale");

  const FitReport e = slope_check(S("(lnln(n))^(-2)/(n*ln(n))"), rate(RateTemplate::LogLogTail, -1, ScaleFn::iter_log(1), 2));
  EXPECT_EQ(e.status, FitStatus::InsufficientSignal);

  EXPECT_THROW(slope_check(S("1/n^2"), rate(RateTemplate::PreciseTail, -2), {100, 1000}), InvalidArgument);
}

TEST(SlopeCheck, PartialLogRatioNeedsExtrapolation) {
  // S(N) = ln N + 0.577..., so the slope reaches 1 only like 1/ln N
  const FitReport a = slope_check(S("1/n"), rate(RateTemplate::LogRatioPartial, 1, ScaleFn::iter_log(1)));
  EXPECT_EQ(a.status, FitStatus::Pass) << a.message;
  EXPECT_GT(std::fabs(a.estimates.back() - 1), 0.02);
  EXPECT_NE(a.message.find("extrapolated"), std::string::npos);
  EXPECT_NEAR(static_cast<double>(*a.estimate), 1, 0.01);

  const FitReport b = slope_check(S("1/n"), rate(RateTemplate::LogRatioPartial, 2, ScaleFn::iter_log(1)));
  EXPECT_EQ(b.status, FitStatus::Fail);
}

TEST(SlopeCheck, UnknownConstant) {
  const FitReport r =
      slope_check(S("3/(n*ln(n))"), rate(RateTemplate::SlowLogUnknown, 0, ScaleFn::iter_log(1)));
  EXPECT_EQ(r.status, FitStatus::Pass) << r.message;
  EXPECT_NEAR(static_cast<double>(*r.estimate), 3, 0.06);
  EXPECT_FALSE(r.predicted);
}

TEST(Oracle, CoherentWithLadderOnCorpus) {
  for (const auto& e : analysis::corpus()) {
    const Coherence c = coherence(e.sequence(), e.expected, {10'000, 100'000, 1'000'000});
    EXPECT_TRUE(c.ok) << e.name << ": " << c.message;
  }
}

TEST(Oracle, Csv) {
  std::ostringstream os;
  write_csv(os, partial_sums(S("1/n^2"), {1, 2}));
  EXPECT_EQ(os.str(), "N,S\n1,1\n2,1.25\n");
}
