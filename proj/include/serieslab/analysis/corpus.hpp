#pragma once

// Built-in example corpus with the statistic values and verdicts each
// entry must reproduce.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "serieslab/analysis/ladder.hpp"

namespace serieslab::analysis {

/// Runs one test by name: raabe, log, increment_log, increment_ratio,
/// slow_log, slow_log_telescoped, hierarchy_quotient, hierarchy_difference,
/// one_sided.
inline Verdict run_test(const std::string& test, const Sequence& s, const ScaleFn& w, int level,
                        const Options& opt = {}) {
  if (test == "raabe") return raabe(s, opt);
  if (test == "log") return log_test(s, w, opt);
  if (test == "increment_log") return increment_log_test(s, w, opt);
  if (test == "increment_ratio") return increment_ratio_test(s, w, opt);
  if (test == "slow_log") return slow_log(s, w, opt);
  if (test == "slow_log_telescoped") return slow_log_telescoped(s, w, opt);
  if (test == "hierarchy_quotient") return hierarchy_level(s, w, level, Form::Quotient, opt);
  if (test == "hierarchy_difference") return hierarchy_level(s, w, level, Form::Difference, opt);
  if (test == "one_sided") return one_sided(s, w, opt);
  throw InvalidArgument("unknown test '" + test + "'");
}

struct Check {
  std::string test;
  std::string w = "n";
  int level = 0;
  std::optional<Rational> value;  // expected statistic value (exact when symbolic)
  int infinite = 0;               // expected +-inf instead of a value
  std::optional<Decision> decision;
  double tolerance = 1e-6;        // numeric backend only
};

struct CorpusEntry {
  std::string name;
  std::string text;  // formula, or a display name for callable entries
  Bindings params;
  std::optional<std::string> w;  // pinned scale
  std::function<Sequence()> make;
  Decision expected = Decision::Inconclusive;
  bool expect_discrepancy_warning = false;
  std::vector<Check> checks;

  Sequence sequence() const { return make ? make() : Sequence::from_text(text, params); }

  Policy policy() const {
    Policy p;
    if (w) p.w = ScaleFn::from_text(*w);
    return p;
  }
};

namespace detail {

inline bool is_even(const ExtScalar& n) {
  const Real h = n.to_real() / Real(2L, n.to_real().precision());
  return floor(h) == h;
}

/// (2 + (-1)^n) / n^q for integer q >= 1 or q = 1/2.
inline Sequence parity_sequence(const std::string& name, const Rational& q) {
  auto ln = [q](const ExtScalar& n) {
    const Precision p = n.precision_config();
    const ExtScalar c(is_even(n) ? 3L : 1L, p);
    return numeric::ext_ln(c) - expr::to_ext(q, p) * numeric::ext_ln(n);
  };
  const long double ql = expr::to_real(q, 64).to_long_double();
  auto fast = [ql](long long n) {
    return (n % 2 == 0 ? 3.0L : 1.0L) / std::pow(static_cast<long double>(n), ql);
  };
  return Sequence::from_callables(name, ln, fast, 1);
}

inline Rational R(const char* s) { return expr::parse_decimal(s); }

}  // namespace detail

inline std::vector<CorpusEntry> corpus() {
  using detail::R;
  std::vector<CorpusEntry> c;

  {
    CorpusEntry e;
    e.name = "example-1";
    e.text = "1/(n*ln(n)^3)";
    e.expected = Decision::Converges;
    e.checks = {{"increment_log", "ln", 0, R("-3"), 0, Decision::Converges}};
    c.push_back(e);
  }
  for (const char* t : {"-2", "-1.2", "-1", "0.5"}) {
    CorpusEntry e;
    e.name = std::string("example-2[t=") + t + "]";
    e.text = "(ln(n))^t/n";
    e.params = {{"t", R(t)}};
    const Rational tv = R(t);
    e.expected = tv < -1 ? Decision::Converges : Decision::Diverges;
    e.checks = {{"log", "n", 0, R("-1"), 0, Decision::Inconclusive},
                {"increment_log", "ln", 0, tv, 0, tv == -1 ? Decision::Inconclusive : e.expected}};
    if (tv == -1) e.checks.push_back({"slow_log", "ln", 0, std::nullopt, 0, Decision::Diverges});
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "example-3";
    e.text = "(lnln(n))^(-2)/(n*ln(n))";
    e.w = "lnln";
    e.expected = Decision::Converges;
    e.checks = {{"increment_log", "lnln", 0, R("-2"), 0, Decision::Converges}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "log-harmonic";
    e.text = "1/(n*ln(n))";
    e.expected = Decision::Diverges;
    e.checks = {{"increment_log", "ln", 0, R("-1"), 0, Decision::Inconclusive},
                {"slow_log", "ln", 0, R("1"), 0, Decision::Diverges}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "log-harmonic-2";
    e.text = "2/(n*ln(n))";
    e.expected = Decision::Diverges;
    e.checks = {{"slow_log", "ln", 0, R("2"), 0, Decision::Diverges}};
    c.push_back(e);
  }
  for (const char* p : {"-2", "-1", "0.5"}) {
    CorpusEntry e;
    e.name = std::string("example-8[p=") + p + "]";
    e.text = "(lnln(n))^p/(n*ln(n))";
    e.params = {{"p", R(p)}};
    e.w = "ln";
    const Rational pv = R(p);
    e.expected = pv < -1 ? Decision::Converges : Decision::Diverges;
    e.checks = {{"increment_log", "ln", 0, R("-1"), 0, Decision::Inconclusive},
                {"hierarchy_quotient", "ln", 1, pv, 0, pv == -1 ? Decision::Inconclusive : e.expected}};
    if (pv == -1) {
      e.checks.push_back({"hierarchy_quotient", "ln", 2, R("0"), 0, Decision::Diverges});
      e.expect_discrepancy_warning = true;
    }
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "final-example";
    e.text = "1/(n*ln(n)*lnln(n))";
    e.w = "ln";
    e.expected = Decision::Diverges;
    e.expect_discrepancy_warning = true;
    e.checks = {{"slow_log", "ln", 0, R("0"), 0, Decision::Inconclusive},
                {"hierarchy_quotient", "ln", 1, R("-1"), 0, Decision::Inconclusive},
                {"hierarchy_quotient", "ln", 2, R("0"), 0, Decision::Diverges}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "inverse-square";
    e.text = "1/n^2";
    e.expected = Decision::Converges;
    e.checks = {{"raabe", "n", 0, R("-2"), 0, Decision::Converges},
                {"log", "n", 0, R("-2"), 0, Decision::Converges},
                {"log", "ln", 0, std::nullopt, -1, Decision::Converges},
                {"increment_ratio", "n", 0, R("-2"), 0, Decision::Converges}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "power-3/2";
    e.text = "n^(-3/2)";
    e.expected = Decision::Converges;
    e.checks = {{"increment_ratio", "n", 0, R("-1.5"), 0, Decision::Converges}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "power-1/2";
    e.text = "n^(-1/2)";
    e.expected = Decision::Diverges;
    e.checks = {{"raabe", "n", 0, R("-0.5"), 0, Decision::Diverges}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "harmonic";
    e.text = "1/n";
    e.expected = Decision::Diverges;
    e.checks = {{"raabe", "n", 0, R("-1"), 0, Decision::Inconclusive},
                {"increment_ratio", "n", 0, R("-1"), 0, Decision::Inconclusive}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "oscillating-cubic";
    e.text = "(2+(-1)^n)/n^3";
    e.make = [] { return detail::parity_sequence("(2+(-1)^n)/n^3", 3); };
    e.expected = Decision::Converges;
    e.checks = {{"one_sided", "n", 0, std::nullopt, 0, Decision::Converges}};
    c.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "oscillating-root";
    e.text = "(2+(-1)^n)/n^(1/2)";
    e.make = [] { return detail::parity_sequence("(2+(-1)^n)/n^(1/2)", Rational(1, 2)); };
    e.expected = Decision::Diverges;
    e.checks = {{"one_sided", "n", 0, std::nullopt, 0, Decision::Diverges}};
    c.push_back(e);
  }
  return c;
}

inline const CorpusEntry& corpus_entry(const std::string& name) {
  static const std::vector<CorpusEntry> all = corpus();
  for (const auto& e : all)
    if (e.name == name) return e;
  throw InvalidArgument("no corpus entry named '" + name + "'");
}

struct CheckResult {
  Check check;
  Verdict verdict;
  bool ok = false;
  std::string detail;
};

struct EntryResult {
  const CorpusEntry* entry = nullptr;
  AnalysisReport report;
  std::vector<CheckResult> checks;
  bool ok = false;
  std::vector<std::string> mismatches;
};

inline CheckResult run_check(const Check& k, const Sequence& s, const Options& opt = {}) {
  CheckResult r;
  r.check = k;
  r.verdict = run_test(k.test, s, ScaleFn::from_text(k.w), k.level, opt);
  const Verdict& v = r.verdict;
  r.ok = true;
  auto fail = [&r](const std::string& why) {
    r.ok = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += why;
  };
  if (k.decision && v.decision != *k.decision)
    fail(std::string("decision ") + to_string(v.decision) + ", expected " + to_string(*k.decision));
  if (k.infinite) {
    const Status want = k.infinite > 0 ? Status::DivergedPos : Status::DivergedNeg;
    if (v.statistic.status != want) fail(std::string("statistic ") + limits::to_string(v.statistic.status));
  } else if (k.value) {
    if (v.exact) {
      if (*v.exact != *k.value) fail("statistic " + expr::to_string(*v.exact) + ", expected " + expr::to_string(*k.value));
    } else if (!v.statistic.converged()) {
      fail(std::string("statistic ") + limits::to_string(v.statistic.status));
    } else {
      const double got = v.statistic.value.to_double();
      const double want = expr::to_real(*k.value, 64).to_double();
      if (std::fabs(got - want) > k.tolerance)
        fail("statistic " + v.statistic.value.to_string(10) + ", expected " + expr::to_string(*k.value));
    }
  }
  return r;
}

inline EntryResult run_entry(const CorpusEntry& e, const Options& opt = {}) {
  EntryResult r;
  r.entry = &e;
  const Sequence s = e.sequence();
  Policy pol = e.policy();
  pol.options = opt;
  r.report = ladder(s, pol);
  r.ok = true;
  if (r.report.final_decision != e.expected) {
    r.ok = false;
    r.mismatches.push_back(std::string("final ") + to_string(r.report.final_decision) + ", expected " +
                           to_string(e.expected));
  }
  bool warned = false;
  for (const auto& w : r.report.warnings) warned = warned || w.find("level rule") != std::string::npos;
  if (warned != e.expect_discrepancy_warning) {
    r.ok = false;
    r.mismatches.push_back(e.expect_discrepancy_warning ? "missing rate-exponent warning"
                                                        : "unexpected rate-exponent warning");
  }
  for (const auto& k : e.checks) {
    r.checks.push_back(run_check(k, s, opt));
    if (!r.checks.back().ok) {
      r.ok = false;
      r.mismatches.push_back(k.test + "(w=" + k.w + (k.level ? ", level " + std::to_string(k.level) : "") +
                             "): " + r.checks.back().detail);
    }
  }
  return r;
}

}  // namespace serieslab::analysis
