#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "serieslab/expr/sequence.hpp"

using namespace serieslab;
using namespace serieslab::expr;
using numeric::ExtScalar;
using numeric::Real;

namespace {

ExtScalar X(const char* s) { return ExtScalar::parse(s); }

double rel(const ExtScalar& a, const ExtScalar& b) {
  return abs((a.to_real() - b.to_real()) / b.to_real()).to_double();
}

// Random product of powers of distinct iterated logs with a positive constant.
std::string random_log_power(std::mt19937_64& rng) {
  static const char* fns[] = {"n", "ln(n)", "lnln(n)", "lnlnln(n)"};
  static const char* pows[] = {"-2", "-1.5", "-1", "-0.5", "0.5", "1", "2", "3"};
  static const char* consts[] = {"1", "2.5", "0.001", "1000"};
  std::uniform_int_distribution<int> coin(0, 1), pw(0, 7), c(0, 3);
  std::string s = consts[c(rng)];
  bool any = false;
  for (int d = 0; d < 4; ++d) {
    if (coin(rng) || (d == 3 && !any)) {
      s += std::string("*") + fns[d] + "^(" + pows[pw(rng)] + ")";
      any = true;
    }
  }
  return s;
}

}  // namespace

TEST(Parse, Examples) {
  const Expr e = parse("1/(n*ln(n))");
  ASSERT_EQ(e->kind, Kind::Div);
  EXPECT_TRUE(is_const(e->args[0], 1));
  ASSERT_EQ(e->args[1]->kind, Kind::Mul);
  EXPECT_EQ(e->args[1]->args[0]->kind, Kind::Var);
  EXPECT_EQ(e->args[1]->args[1]->kind, Kind::Ln);

  const Expr f = parse("(lnln(n))^p / (n*ln(n))");
  EXPECT_EQ(params(f), std::set<std::string>{"p"});
  ASSERT_EQ(f->args[0]->kind, Kind::Pow);
  EXPECT_EQ(f->args[0]->args[0]->kind, Kind::IterLn);
  EXPECT_EQ(f->args[0]->args[0]->k, 2);

  EXPECT_EQ(parse("log_3(n)")->k, 3);
  EXPECT_EQ(parse("  n ^ -2 ")->args[1]->kind, Kind::Neg);
  EXPECT_EQ(parse("1.5e-3")->value, Rational(3, 2000));
}

TEST(Parse, Errors) {
  try {
    parse("n*");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
  EXPECT_THROW(parse(""), SyntaxError);
  EXPECT_THROW(parse("(n"), SyntaxError);
  EXPECT_THROW(parse("n^n"), SyntaxError);
  EXPECT_THROW(parse("n^2^3"), SyntaxError);
  EXPECT_THROW(parse("ln()"), ArityError);
  EXPECT_THROW(parse("ln(n, 2)"), ArityError);
  EXPECT_THROW(parse("ln n"), ArityError);
  EXPECT_THROW(parse("sin(n)"), ArityError);
  EXPECT_THROW(parse("log_0(n)"), ArityError);
}

TEST(Parse, PrintRoundTrip) {
  for (const char* s : {"1/(n*ln(n))", "(lnln(n))^p/(n*ln(n))", "n - (n - 1)", "-n^2", "2^-3", "a/b/c",
                        "a/(b/c)", "a - -b", "exp(-n)*log_1(n)", "lnlnlnln(n)^0.25", "(n + 1)^(p - 1)",
                        "log_7(exp(exp(n)))", "--n", "(-n)^2"}) {
    const Expr e = parse(s);
    const Expr back = parse(print(e));
    EXPECT_TRUE(structurally_equal(e, back)) << s << " -> " << print(e);
  }
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Expr e = parse(random_log_power(rng));
    EXPECT_TRUE(structurally_equal(e, parse(print(e))));
  }
}

TEST(Eval, Examples) {
  EXPECT_EQ(eval(parse("1/n^2"), ExtScalar(10L)).to_real().to_string(30), "1e-2");
  const ExtScalar e10 = numeric::ext_exp(ExtScalar(10L));
  const ExtScalar v = eval(parse("(ln(n))^(-1)/n"), e10);
  const ExtScalar want = numeric::ext_exp(ExtScalar(-10L)) / ExtScalar(10L);
  EXPECT_LT(rel(v, want), 1e-70);

  // Hand evaluation of the closed form in long double.
  const ExtScalar n = ExtScalar::tower(2, Real(3L, 256));
  const ExtScalar w = eval(parse("(lnln(n))^(-1)/(n*ln(n))"), n);
  const long double ref = std::exp(-std::exp(3.0L)) * std::exp(-3.0L) / 3.0L;
  EXPECT_NEAR(static_cast<double>(w.to_long_double() / ref), 1.0, 1e-15);

  EXPECT_THROW(eval(parse("n^p"), ExtScalar(2L)), UnboundParameter);
  EXPECT_THROW(eval(parse("ln(n - 5)"), ExtScalar(2L)), DomainError);
}

TEST(Eval, TowerScale) {
  const ExtScalar n = ExtScalar::tower(4, Real(1.5L, 256));
  const ExtScalar v = eval(parse("1/(n*ln(n)*lnln(n)*lnlnln(n))"), n);
  EXPECT_TRUE(v.is_tower());
  EXPECT_TRUE(v.is_reciprocal());
  EXPECT_GT(v.sign(), 0);
}

TEST(LogTransform, Examples) {
  const Bindings b{{"t", Rational(-6, 5)}};
  const Expr L = log_transform(parse("(ln(n))^t / n"));
  const Expr want = parse("t*lnln(n) - ln(n)");
  for (const char* s : {"100", "1e10", "exp^2(3)"}) {
    const ExtScalar n = X(s);
    EXPECT_LT(abs(eval(L, n, b) - eval(want, n, b)).to_double(), 1e-60) << s;
  }
  EXPECT_TRUE(structurally_equal(log_transform(parse("exp(n)")), parse("n")));
  const Expr M = log_transform(parse("1/(n*ln(n)*lnln(n))"));
  EXPECT_TRUE(structurally_equal(M, parse("-ln(n) - lnln(n) - lnlnln(n)"))) << print(M);

  EXPECT_TRUE(log_linear(parse("1/(n+1)")).opaque);
  EXPECT_FALSE(log_linear(parse("ln(n^2)")).opaque);
  EXPECT_FALSE(log_linear(parse("exp(2*n - ln(n))")).opaque);
}

TEST(LogTransform, MatchesLogOfValue) {
  std::mt19937_64 rng(17);
  const std::vector<ExtScalar> grid = {X("20"),      X("1000"),    X("1e8"),     X("1e40"),    X("1e300"),
                                       X("exp^2(7)"), X("exp^3(2)"), X("exp^3(9)"), X("exp^4(1.5)"), X("exp^4(2)")};
  for (int i = 0; i < 1000; ++i) {
    const Expr e = parse(random_log_power(rng));
    const Expr L = log_transform(e);
    for (const auto& n : grid) {
      const ExtScalar lhs = eval(L, n);
      const ExtScalar v = eval(e, n);
      if (v.is_plain()) {
        const ExtScalar rhs = numeric::ext_ln(v);
        const double bound = std::ldexp(1.0, 8 - 256) * std::max(1.0, std::fabs(rhs.to_double()));
        EXPECT_LE(abs(lhs - rhs).to_double(), bound) << print(e) << " at " << n.to_string();
      } else {
        // Out of plain range: compare tower forms.
        const ExtScalar back = numeric::ext_exp(lhs);
        ASSERT_EQ(back.level(), v.level()) << print(e);
        EXPECT_EQ(back.is_reciprocal(), v.is_reciprocal());
        const Real dr = abs(back.residue() - v.residue()) / v.residue();
        EXPECT_LE(dr.to_double(), std::ldexp(1.0, 8 - 256)) << print(e) << " at " << n.to_string();
      }
    }
  }
}

TEST(LogPower, Examples) {
  const auto a = to_log_power(parse("1/n^2"));
  ASSERT_TRUE(a);
  EXPECT_TRUE(a->log_c.is_zero());
  EXPECT_EQ(a->p, (std::vector<Rational>{-2}));

  const auto b = to_log_power(parse("(lnln(n))^(-1)/(n*ln(n))"));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->p, (std::vector<Rational>{-1, -1, -1}));

  EXPECT_FALSE(to_log_power(parse("1/(n+1)")));
  EXPECT_FALSE(to_log_power(parse("exp(-n)")));
  EXPECT_THROW(to_log_power(parse("n^p")), UnboundParameter);

  const auto c = to_log_power(parse("3*(ln(n))^p/n"), {{"p", Rational(1, 2)}});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->p, (std::vector<Rational>{-1, Rational(1, 2)}));
  EXPECT_LT(std::fabs(c->c().to_double() - 3.0), 1e-15);

  const auto d = to_log_power(parse("ln(n^2)/n^2"));  // 2 ln n / n^2
  ASSERT_TRUE(d);
  EXPECT_EQ(d->p, (std::vector<Rational>{-2, 1}));
  EXPECT_LT(std::fabs(d->c().to_double() - 2.0), 1e-15);

  EXPECT_FALSE(to_log_power(parse("-1/n^2")));
}

TEST(LogPower, RebuildRoundTrip) {
  std::mt19937_64 rng(23);
  const std::vector<ExtScalar> grid = {X("20"), X("300"), X("1e5"), X("1e9"), X("1e20"),
                                       X("1e50"), X("1e100"), X("1e200"), X("exp^1(1000)"), X("exp^1(5000)")};
  for (int i = 0; i < 200; ++i) {
    const Expr e = parse(random_log_power(rng));
    const auto f = to_log_power(e);
    ASSERT_TRUE(f) << print(e);
    const Expr r = f->to_expr();
    for (const auto& n : grid) {
      const ExtScalar x = eval(e, n), y = eval(r, n);
      if (x.is_plain() && y.is_plain()) {
        EXPECT_LT(rel(y, x), 1e-60) << print(e);
      }
    }
  }
}

TEST(Positivity, Examples) {
  EXPECT_NO_THROW(check_positive(parse("1/n"), 1));
  try {
    check_positive(parse("(lnln(n))^(-1)"), 2);
    FAIL();
  } catch (const PositivityViolation& v) {
    EXPECT_EQ(v.witness(), "2");
  }
  const auto rep = check_positive(parse("1/(n*ln(n)*lnln(n)*lnlnln(n))"), 16);
  EXPECT_TRUE(rep.symbolic);
  EXPECT_EQ(rep.positivity_start, 16);
  EXPECT_EQ(rep.statistic_domain_start, "3814280");  // ceil(exp(exp(e)))

  EXPECT_THROW(check_positive(parse("1/(n - 10)"), 5), PositivityViolation);
  const auto num = check_positive(parse("1/(n^2 + 1)"), 1);
  EXPECT_FALSE(num.symbolic);
  EXPECT_GT(num.samples_checked, 64u);
}

TEST(Positivity, InferredStart) {
  EXPECT_EQ(infer_n0(parse("1/n^2")), 1);
  EXPECT_EQ(infer_n0(parse("1/(n*ln(n))")), 2);
  EXPECT_EQ(infer_n0(parse("1/(n*ln(n)*lnln(n))")), 3);
  EXPECT_EQ(infer_n0(parse("1/(n*ln(n)*lnln(n)*lnlnln(n))")), 16);
  EXPECT_EQ(infer_n0(parse("1/ln(n - 10)")), 12);
}

TEST(Sequence, FastEvaluatorAgrees) {
  const Sequence s = Sequence::from_text("(lnln(n))^p/(n*ln(n))", {{"p", Rational(-2)}});
  EXPECT_EQ(s.n0(), 3);
  for (long long n : {3LL, 10LL, 1000LL, 123456789LL}) {
    const long double fast = s.term_ld(n);
    const long double slow = s.term(ExtScalar(static_cast<long>(n))).to_long_double();
    EXPECT_NEAR(static_cast<double>(fast / slow), 1.0, 1e-15);
  }
  Sequence t = s;
  t.set_prefix(5, 7.0L);
  EXPECT_EQ(t.term_ld(5), 7.0L);
  EXPECT_THROW(t.set_prefix(101, 1.0L), InvalidArgument);
  EXPECT_THROW(Sequence::from_text("n^p"), UnboundParameter);
}
