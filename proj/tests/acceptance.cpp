// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path-to-serieslab-cli>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "serieslab/analysis/corpus.hpp"
#include "serieslab/oracle/oracle.hpp"

using namespace serieslab;
using namespace serieslab::analysis;
using expr::Rational;
using numeric::ExtScalar;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      else detail.str("");
      pass = false;
      detail << what;
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Rational Q(const std::string& s) { return expr::parse_decimal(s); }
const ScaleFn LN = ScaleFn::iter_log(1);

// n^p0 * ln(n)^p1 * ... with the exponents bound as parameters.
Sequence bertrand(const std::vector<Rational>& p) {
  static const char* factor[] = {"n", "ln(n)", "lnln(n)", "lnlnln(n)"};
  std::string text;
  expr::Bindings b;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::string name = "p" + std::to_string(i);
    if (i) text += "*";
    text += "(" + std::string(factor[i]) + ")^" + name;
    b[name] = p[i];
  }
  return Sequence::from_text(text, b);
}

Decision first_non_minus_one(const std::vector<Rational>& p) {
  for (const Rational& x : p)
    if (x != -1) return x < -1 ? Decision::Converges : Decision::Diverges;
  return Decision::Diverges;
}

std::string tuple_text(const std::vector<Rational>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + expr::to_string(p[i]);
  return s + ")";
}

Options numeric_only() {
  Options o;
  o.backend = Backend::Numeric;
  return o;
}

void bertrand_equivalence(Outcome& o) {
  const auto t0 = Clock::now();
  const std::array<const char*, 6> grid = {"-2", "-1.5", "-1", "-0.5", "0", "1"};
  int cases = 0, mismatches = 0;
  for (std::size_t len = 1; len <= 4; ++len) {
    std::vector<std::size_t> idx(len, 0);
    for (;;) {
      std::vector<Rational> p;
      for (std::size_t i : idx) p.push_back(Q(grid[i]));
      ++cases;
      const AnalysisReport r = ladder(bertrand(p), {});
      if (r.backend != "symbolic" || r.final_decision != first_non_minus_one(p)) {
        if (++mismatches <= 3)
          o.require(false, tuple_text(p) + " gave " + to_string(r.final_decision) + " on " + r.backend);
      }
      std::size_t k = 0;
      while (k < len && ++idx[k] == grid.size()) idx[k++] = 0;
      if (k == len) break;
    }
  }
  const double dt = seconds_since(t0);
  o.require(cases == 6 * 6 * 6 * 6 + 6 * 6 * 6 + 6 * 6 + 6, "case count " + std::to_string(cases));
  o.require(dt < 60, "runtime " + std::to_string(dt) + " s");
  if (o.pass) o.detail << cases << " tuples, 0 mismatches, " << dt << " s";
  else o.detail << " (" << mismatches << " mismatches)";
}

void example_two(Outcome& o) {
  double worst = 0;
  for (const char* t : {"-2", "-1.2", "-1", "0.5"}) {
    const Sequence s = Sequence::from_text("(ln(n))^t/n", {{"t", Q(t)}});
    const Verdict a = log_test(s, ScaleFn::identity());
    o.require(a.exact && *a.exact == -1 && a.decision == Decision::Inconclusive,
              std::string("log test at w=n, t=") + t);
    const Verdict b = increment_log_test(s, LN);
    o.require(b.exact && *b.exact == Q(t), std::string("increment log test at w=ln, t=") + t);
    const Verdict c = increment_log_test(s, LN, numeric_only());
    o.require(c.statistic.converged() && c.statistic.grid.find("tower:2") != std::string::npos,
              std::string("numeric tower grid, t=") + t);
    const double err = std::fabs(c.statistic.value.to_double() - std::stod(t));
    worst = std::max(worst, err);
    o.require(err < 1e-6, std::string("numeric error for t=") + t + " is " + std::to_string(err));
  }
  if (o.pass) o.detail << "exact theta=-1 and theta=t; numeric max error " << worst;
}

void slow_log_rate(Outcome& o) {
  const auto t0 = Clock::now();
  const Sequence s = Sequence::from_text("1/(n*ln(n))");
  const Verdict v = slow_log(s, LN);
  o.require(v.decision == Decision::Diverges, "verdict not Diverges");
  o.require(v.rate && v.rate->tmpl == RateTemplate::SlowLog && std::fabs(v.rate->parameter.to_double() - 1) < 1e-12,
            "rate is not partial ~ 1 * lnln N");
  if (!v.rate) return;
  const oracle::FitReport f = oracle::slope_check(s, *v.rate, {10'000, 100'000, 1'000'000, 10'000'000}, 0.02);
  o.require(f.status == oracle::FitStatus::Pass, "slope check: " + f.message);
  for (long double e : f.estimates)
    o.require(std::fabs(static_cast<double>(e) - 1) < 0.02, "slope " + std::to_string(static_cast<double>(e)));
  const double dt = seconds_since(t0);
  o.require(dt < 60, "runtime " + std::to_string(dt) + " s");
  if (o.pass) {
    o.detail << "C=1, slopes";
    for (long double e : f.estimates) o.detail << " " << static_cast<double>(e);
    o.detail << ", " << dt << " s";
  }
}

void example_eight(Outcome& o) {
  for (const char* p : {"-2", "-1", "0.5"}) {
    const Sequence s = Sequence::from_text("(lnln(n))^p/(n*ln(n))", {{"p", Q(p)}});
    const Verdict level0 = increment_log_test(s, LN);
    o.require(level0.exact && *level0.exact == -1, std::string("level-0 statistic, p=") + p);
    const Verdict b1 = hierarchy_level(s, LN, 1, Form::Quotient);
    o.require(b1.symbolic && b1.exact && *b1.exact == Q(p), std::string("beta_1, p=") + p);
    if (std::string(p) != "-2") continue;
    o.require(b1.decision == Decision::Converges, "p=-2 not Converges");
    o.require(b1.rate && b1.rate->tmpl == RateTemplate::LogLogTail && b1.rate->exact && *b1.rate->exact == -1,
              "p=-2 tail exponent is not -1");
    if (!b1.rate) continue;
    const oracle::FitReport f = oracle::slope_check(s, *b1.rate);
    o.require(f.status == oracle::FitStatus::InsufficientSignal,
              std::string("slope check tagged ") + oracle::to_string(f.status));
  }
  if (o.pass) o.detail << "beta_1 = p exactly; p=-2 tail exponent -1; oracle unverifiable-at-scale";
}

void final_example(Outcome& o) {
  const Sequence s = Sequence::from_text("1/(n*ln(n)*lnln(n))");
  const auto levels = hierarchy(s, LN, 4, Form::Quotient);
  o.require(levels.size() == 2, "hierarchy length " + std::to_string(levels.size()));
  if (levels.size() == 2) {
    o.require(levels[0].exact && *levels[0].exact == -1, "beta_1 != -1");
    o.require(levels[1].exact && *levels[1].exact == 0, "beta_2 != 0");
    o.require(levels[1].decision == Decision::Diverges, "level 2 not Diverges");
  }
  Policy pol;
  pol.w = LN;
  const AnalysisReport r = ladder(s, pol);
  o.require(r.final_decision == Decision::Diverges, "ladder verdict not Diverges");
  bool warned = false;
  for (const auto& w : r.warnings) warned = warned || w.find("beta + 1 = 1") != std::string::npos;
  o.require(warned, "discrepancy warning missing");
  if (o.pass) o.detail << "beta_1=-1, beta_2=0, Diverges, warning present";
}

void precise_rates(Outcome& o) {
  const auto t0 = Clock::now();
  const oracle::Config cfg{100'000'000, oracle::Method::Compensated};
  auto rel = [](long double got, double want) { return std::fabs(static_cast<double>(got) / want - 1); };

  const auto a = oracle::tail_sum(Sequence::from_text("1/n^2"), 10'000, 1'000'000, true, cfg);
  const auto b = oracle::tail_sum(Sequence::from_text("n^(-3/2)"), 10'000, 1'000'000, true, cfg);
  const auto c = oracle::partial_sum(Sequence::from_text("n^(-1/2)"), 1'000'000, cfg);
  o.require(a.remainder.has_value() && b.remainder.has_value(), "tail remainder not accepted");
  o.require(rel(a.value, 1e-4) < 1e-3, "1/n^2 tail off by " + std::to_string(rel(a.value, 1e-4)));
  o.require(rel(b.value, 2e-2) < 2e-3, "n^(-3/2) tail off by " + std::to_string(rel(b.value, 2e-2)));
  o.require(rel(c.value, 2e3) < 1e-3, "n^(-1/2) partial off by " + std::to_string(rel(c.value, 2e3)));
  const double dt = seconds_since(t0);
  if (o.pass)
    o.detail << "relative gaps " << rel(a.value, 1e-4) << ", " << rel(b.value, 2e-2) << ", " << rel(c.value, 2e3)
             << ", " << dt << " s";
}

std::vector<limits::Sample> samples(int j0, int j1, const std::function<double(int)>& f) {
  std::vector<limits::Sample> s;
  for (int j = j0; j <= j1; ++j)
    s.push_back({ExtScalar(static_cast<long>(j)), ExtScalar(static_cast<long double>(f(j)))});
  return s;
}

void estimator_calibration(Outcome& o) {
  const auto x = samples(1, 64, [](int j) { return -1.0 + 3.0 / j; });
  const auto e = limits::estimate_limit(x);
  const double err = std::fabs(e.value.to_double() + 1);
  o.require(e.converged() && err < 1e-3, "limit error " + std::to_string(err));

  const auto y = samples(1, 64, [](int j) { return (j % 2 ? -1.0 : 1.0) * (1.0 + 1.0 / j); });
  const auto [sup, inf] = limits::estimate_limsup_liminf(y);
  const double es = std::fabs(sup.value.to_double() - 1), ei = std::fabs(inf.value.to_double() + 1);
  o.require(sup.converged() && es < 1e-2, "limsup error " + std::to_string(es));
  o.require(inf.converged() && ei < 1e-2, "liminf error " + std::to_string(ei));
  if (o.pass)
    o.detail << x.size() << " samples: limit error " << err << ", limsup error " << es << ", liminf error " << ei;
}

void invariance_fuzz(Outcome& o) {
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<int> len(1, 4), quarter(-12, 8), coin(0, 9), index(1, 100);
  std::uniform_real_distribution<double> log_value(-30, 5);
  Policy num;
  num.options = numeric_only();
  int runs = 0, changed = 0;
  for (int k = 0; k < 200; ++k) {
    std::vector<Rational> p;
    const int m = len(rng);
    for (int i = 0; i < m; ++i) p.push_back(coin(rng) < 4 ? Rational(-1) : Rational(quarter(rng), 4));
    const Sequence s = bertrand(p);
    const Decision base_sym = ladder(s, {}).final_decision;
    const Decision base_num = ladder(s, num).final_decision;
    for (const char* c : {"0.001", "1000"}) {
      Sequence t = s.scaled(Q(c));
      for (int j = 0; j < 3; ++j) t.set_prefix(index(rng), std::exp(static_cast<long double>(log_value(rng))));
      runs += 2;
      const Decision sym = ladder(t, {}).final_decision;
      const Decision nm = ladder(t, num).final_decision;
      if (sym != base_sym && ++changed <= 3)
        o.require(false, tuple_text(p) + " c=" + c + " symbolic " + to_string(base_sym) + " -> " + to_string(sym));
      if (nm != base_num && ++changed <= 3)
        o.require(false, tuple_text(p) + " c=" + c + " numeric " + to_string(base_num) + " -> " + to_string(nm));
    }
  }
  if (o.pass) o.detail << runs << " mutated runs over 200 sequences and both backends, 0 verdict changes";
  else o.detail << " (" << changed << " of " << runs << " changed)";
}

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return q + "'";
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return out;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), got);
  pclose(f);
  return out;
}

void determinism(Outcome& o, const std::string& cli) {
  if (cli.empty()) {
    o.require(false, "no CLI path given");
    return;
  }
  int n = 0;
  for (const auto& e : corpus()) {
    const std::string cmd = shell_quote(cli) + " analyze --json --corpus " + shell_quote(e.name) + " 2>&1";
    const std::string a = capture(cmd), b = capture(cmd);
    o.require(!a.empty() && a.find("\"version\"") != std::string::npos, e.name + ": no report");
    o.require(a == b, e.name + ": reports differ");
    ++n;
  }
  if (o.pass) o.detail << n << " corpus entries, byte-identical reports";
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"bertrand classifier equivalence", bertrand_equivalence},
      {"log-power example at w=n and w=ln", example_two},
      {"slow-log rate of 1/(n ln n)", slow_log_rate},
      {"first hierarchy level on (lnln n)^p/(n ln n)", example_eight},
      {"second hierarchy level on 1/(n ln n lnln n)", final_example},
      {"precise tail and partial-sum rates", precise_rates},
      {"limit estimator calibration", estimator_calibration},
      {"scaling and prefix invariance fuzz", invariance_fuzz},
      {"CLI report determinism", [&cli](Outcome& o) { determinism(o, cli); }},
  };
  int failed = 0, k = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << ++k << "] " << name << ": " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
