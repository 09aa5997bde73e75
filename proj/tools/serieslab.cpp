// serieslab command line: analyze, sum, verify, examples.
//
// Exit codes: 0 decisive verdict (or result matching --expect, or a passed
// or unverifiable rate check), 1 input error, 2 inconclusive, 3 mismatch
// with --expect, a failed rate check, or a corpus deviation.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "serieslab/analysis/corpus.hpp"
#include "serieslab/analysis/report_json.hpp"
#include "serieslab/oracle/oracle.hpp"

using namespace serieslab;
using analysis::Decision;
using analysis::Json;

namespace {

constexpr int kOk = 0, kInputError = 1, kInconclusive = 2, kMismatch = 3;

/// An error tagged with the stage that raised it.
struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& what) : std::runtime_error(stage + ": " + what) {}
};

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

struct RunConfig {
  std::string expr;
  std::vector<std::string> params;
  std::string corpus;
  std::string w = "auto";
  int kmax = 4;
  unsigned precision = numeric::Precision{}.significand_bits;
  std::string grid;
  long long budget = oracle::Config{}.budget;
  bool json = false;
  std::string expect;
  std::string form = "quotient";
  std::string backend = "auto";
  // sum / verify
  std::vector<long long> checkpoints;
  long long tail_from = 0;
  std::string method = "compensated";
  std::string csv;
  double tolerance = 0;
};

expr::Rational parse_value(const std::string& v) {
  const auto slash = v.find('/');
  if (slash == std::string::npos) return expr::parse_decimal(v);
  const expr::Rational d = expr::parse_decimal(v.substr(slash + 1));
  if (d == 0) throw InvalidArgument("zero denominator in '" + v + "'");
  return expr::parse_decimal(v.substr(0, slash)) / d;
}

expr::Bindings parse_params(const std::vector<std::string>& items) {
  expr::Bindings b;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--param needs NAME=VALUE, got '" + it + "'");
    b[it.substr(0, eq)] = parse_value(it.substr(eq + 1));
  }
  return b;
}

struct Target {
  expr::Sequence seq;
  std::optional<scale::ScaleFn> w;
};

Target target(const RunConfig& c) {
  if (!c.corpus.empty()) {
    if (!c.expr.empty()) throw StageError("input", "give either an expression or --corpus, not both");
    const auto& e = stage("corpus", [&] { return analysis::corpus_entry(c.corpus); });
    Target t{e.sequence(), std::nullopt};
    if (e.w) t.w = scale::ScaleFn::from_text(*e.w);
    if (c.w != "auto") t.w = stage("scale", [&] { return scale::ScaleFn::from_text(c.w); });
    return t;
  }
  if (c.expr.empty()) throw StageError("input", "missing expression");
  const expr::Bindings b = stage("params", [&] { return parse_params(c.params); });
  Target t{stage("parse", [&] { return expr::Sequence::from_text(c.expr, b); }), std::nullopt};
  if (c.w != "auto") t.w = stage("scale", [&] { return scale::ScaleFn::from_text(c.w); });
  return t;
}

analysis::Policy policy(const RunConfig& c, const Target& t) {
  analysis::Policy p;
  p.w = t.w;
  p.k_max = c.kmax;
  p.form = c.form == "difference" ? analysis::Form::Difference : analysis::Form::Quotient;
  p.options.backend = c.backend == "symbolic"  ? analysis::Backend::Symbolic
                      : c.backend == "numeric" ? analysis::Backend::Numeric
                                               : analysis::Backend::Auto;
  p.options.precision.significand_bits = c.precision;
  stage("precision", [&] { p.options.precision.validate(); return 0; });
  if (!c.grid.empty()) p.options.grid = stage("grid", [&] { return limits::GridSchedule::parse(c.grid); });
  return p;
}

std::optional<Decision> expectation(const RunConfig& c) {
  if (c.expect.empty()) return std::nullopt;
  return c.expect == "converges" ? Decision::Converges : Decision::Diverges;
}

std::string stat_text(const analysis::Verdict& v) {
  if (v.exact) return expr::to_string(*v.exact) + " (exact)";
  const auto& e = v.statistic;
  switch (e.status) {
    case limits::Status::DivergedPos: return "+inf";
    case limits::Status::DivergedNeg: return "-inf";
    case limits::Status::NotConverged: return "no limit";
    case limits::Status::Converged: break;
  }
  if (v.symbolic) return e.value.to_string(10) + " (exact)";
  return e.value.to_string(10) + " +- " + e.uncertainty.to_string(2);
}

void print_report(std::ostream& os, const analysis::AnalysisReport& r) {
  os << "sequence: " << r.sequence;
  if (r.normal_form) os << "   [" << *r.normal_form << "]";
  os << "\nbackend:  " << r.backend << "\n";
  for (const auto& v : r.trace) {
    std::ostringstream head;
    head << v.test;
    if (v.level) head << "[" << v.level << "]";
    head << "(w=" << v.w << ")";
    os << "  " << std::left << std::setw(28) << head.str() << std::setw(26) << stat_text(v) << std::setw(13)
       << analysis::to_string(v.decision) << v.reason << "\n";
  }
  os << "final:    " << analysis::to_string(r.final_decision) << "  (" << r.final_reason << ")\n";
  if (r.final_index && r.trace[*r.final_index].rate) os << "rate:     " << r.trace[*r.final_index].rate->formula() << "\n";
  for (const auto& w : r.warnings) os << "warning:  " << w << "\n";
}

int analyze_exit(const analysis::AnalysisReport& r, const std::optional<Decision>& want) {
  if (want) return r.final_decision == *want ? kOk : kMismatch;
  return r.final_decision == Decision::Inconclusive ? kInconclusive : kOk;
}

void emit_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_analyze(const RunConfig& c) {
  const Target t = target(c);
  const auto pol = policy(c, t);
  const auto rep = stage("analysis", [&] { return analysis::ladder(t.seq, pol); });
  if (c.json) emit_json(analysis::to_json(rep));
  else print_report(std::cout, rep);
  return analyze_exit(rep, expectation(c));
}

oracle::Config oracle_config(const RunConfig& c) {
  oracle::Config o;
  if (c.budget < 1) throw StageError("budget", "must be positive");
  o.budget = c.budget;
  o.method = c.method == "pairwise" ? oracle::Method::Pairwise : oracle::Method::Compensated;
  return o;
}

Json sum_json(const oracle::SumResult& r) {
  Json j;
  j["N"] = r.tail ? r.first : r.last;
  j["kind"] = r.tail ? "tail" : "partial";
  j["first"] = r.first;
  j["last"] = r.last;
  j["n_terms"] = r.n_terms;
  j["value"] = static_cast<double>(r.value);
  j["method"] = oracle::to_string(r.method);
  j["estimated_roundoff"] = static_cast<double>(r.estimated_roundoff);
  j["remainder"] = r.remainder ? Json(static_cast<double>(*r.remainder)) : Json(nullptr);
  j["truncation_bound"] = static_cast<double>(r.truncation_bound);
  return j;
}

void write_csv(const std::string& path, const std::vector<oracle::SumResult>& sums) {
  if (path.empty()) return;
  if (path == "-") {
    oracle::write_csv(std::cout, sums);
    return;
  }
  std::ofstream f(path);
  if (!f) throw StageError("csv", "cannot open '" + path + "'");
  oracle::write_csv(f, sums);
}

int cmd_sum(const RunConfig& c) {
  const Target t = target(c);
  const oracle::Config oc = oracle_config(c);
  std::vector<long long> cps = c.checkpoints.empty() ? oracle::default_checkpoints() : c.checkpoints;
  std::vector<oracle::SumResult> sums;
  if (c.tail_from > 0) {
    // tails from --tail to the largest checkpoint, plus the integral remainder
    const long long end = *std::max_element(cps.begin(), cps.end());
    sums = stage("oracle", [&] { return oracle::tail_sums(t.seq, {c.tail_from}, end, true, oc); });
  } else {
    sums = stage("oracle", [&] { return oracle::partial_sums(t.seq, cps, oc); });
  }
  if (c.json) {
    Json j;
    j["version"] = "serieslab.sum/1";
    j["sequence"] = t.seq.text();
    Json params = Json::object();
    for (const auto& [k, v] : t.seq.bindings()) params[k] = expr::to_string(v);
    j["params"] = params;
    Json arr = Json::array();
    for (const auto& r : sums) arr.push_back(sum_json(r));
    j["sums"] = arr;
    emit_json(j);
  } else if (c.csv != "-") {
    std::cout.precision(std::numeric_limits<long double>::max_digits10);
    for (const auto& r : sums)
      std::cout << (r.tail ? "tail from " + std::to_string(r.first) : "S(" + std::to_string(r.last) + ")") << " = "
                << r.value << "  (roundoff " << std::setprecision(2) << r.estimated_roundoff
                << std::setprecision(std::numeric_limits<long double>::max_digits10) << ")\n";
  }
  write_csv(c.csv, sums);
  return kOk;
}

Json fit_json(const oracle::FitReport& f) {
  Json j;
  j["template"] = analysis::to_string(f.tmpl);
  j["status"] = oracle::to_string(f.status);
  j["quantity"] = f.quantity;
  j["tolerance"] = f.tolerance;
  j["predicted"] = f.predicted ? Json(static_cast<double>(*f.predicted)) : Json(nullptr);
  j["estimate"] = f.estimate ? Json(static_cast<double>(*f.estimate)) : Json(nullptr);
  Json est = Json::array();
  for (long double e : f.estimates) est.push_back(static_cast<double>(e));
  j["estimates"] = est;
  Json pts = Json::array();
  for (const auto& p : f.points) {
    Json q;
    q["N"] = p.N;
    q["sum"] = static_cast<double>(p.sum);
    q["roundoff"] = static_cast<double>(p.roundoff);
    q["functional"] = static_cast<double>(p.functional);
    pts.push_back(q);
  }
  j["checkpoints"] = pts;
  j["message"] = f.message;
  return j;
}

int cmd_verify(const RunConfig& c) {
  const Target t = target(c);
  const auto pol = policy(c, t);
  const auto rep = stage("analysis", [&] { return analysis::ladder(t.seq, pol); });
  const oracle::Config oc = oracle_config(c);
  Json oracle_slot = nullptr;
  std::optional<oracle::FitReport> fit;
  const analysis::RatePrediction* rate = nullptr;
  if (rep.final_index && rep.trace[*rep.final_index].rate) rate = &*rep.trace[*rep.final_index].rate;
  if (rate) {
    const bool precise = rate->tmpl == analysis::RateTemplate::PreciseTail ||
                         rate->tmpl == analysis::RateTemplate::PrecisePartial;
    const double tol = c.tolerance > 0 ? c.tolerance : precise ? 1e-3 : 0.02;
    const auto cps = c.checkpoints.empty() ? oracle::default_checkpoints() : c.checkpoints;
    fit = stage("oracle", [&] { return oracle::slope_check(t.seq, *rate, cps, tol, oc); });
    oracle_slot = fit_json(*fit);
    if (!c.csv.empty()) {
      std::vector<oracle::SumResult> sums;
      for (const auto& p : fit->points) {
        oracle::SumResult r;
        r.last = r.first = p.N;
        r.value = p.sum;
        sums.push_back(r);
      }
      write_csv(c.csv, sums);
    }
  }
  if (c.json) {
    emit_json(analysis::to_json(rep, oracle_slot));
  } else {
    print_report(std::cout, rep);
    if (!fit) {
      std::cout << "verify:   no rate prediction to check\n";
    } else {
      std::cout << "verify:   " << oracle::to_string(fit->status) << "  " << fit->quantity;
      if (!fit->estimates.empty()) {
        std::cout << " [";
        for (std::size_t i = 0; i < fit->estimates.size(); ++i)
          std::cout << (i ? ", " : "") << std::setprecision(6) << static_cast<double>(fit->estimates[i]);
        std::cout << "]";
      }
      std::cout << "\n          " << fit->message << "\n";
    }
  }
  if (const auto want = expectation(c); want && rep.final_decision != *want) return kMismatch;
  if (!fit) return rep.final_decision == Decision::Inconclusive ? kInconclusive : kOk;
  return fit->status == oracle::FitStatus::Fail ? kMismatch : kOk;
}

int cmd_examples(const RunConfig& c) {
  analysis::Options opt;
  opt.backend = c.backend == "symbolic"  ? analysis::Backend::Symbolic
                : c.backend == "numeric" ? analysis::Backend::Numeric
                                         : analysis::Backend::Auto;
  Json entries = Json::array();
  bool all_ok = true;
  if (!c.json)
    std::cout << std::left << std::setw(22) << "entry" << std::setw(12) << "expected" << std::setw(14) << "final"
              << std::setw(28) << "decided by" << "status\n";
  for (const auto& e : analysis::corpus()) {
    const auto r = stage("corpus " + e.name, [&] { return analysis::run_entry(e, opt); });
    all_ok = all_ok && r.ok;
    if (c.json) {
      Json j;
      j["name"] = e.name;
      j["ok"] = r.ok;
      j["mismatches"] = r.mismatches;
      j["report"] = analysis::to_json(r.report);
      entries.push_back(j);
      continue;
    }
    std::string by = "-";
    if (r.report.final_index) {
      const auto& f = r.report.trace[*r.report.final_index];
      by = f.test + (f.level ? "[" + std::to_string(f.level) + "]" : "") + "(w=" + f.w + ")";
    }
    std::cout << std::setw(22) << e.name << std::setw(12) << analysis::to_string(e.expected) << std::setw(14)
              << analysis::to_string(r.report.final_decision) << std::setw(28) << by << (r.ok ? "ok" : "MISMATCH")
              << "\n";
    for (const auto& m : r.mismatches) std::cout << "    " << m << "\n";
  }
  if (c.json) {
    Json j;
    j["version"] = "serieslab.examples/1";
    j["entries"] = entries;
    emit_json(j);
  }
  return all_ok ? kOk : kMismatch;
}

void add_analysis_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("expression", c.expr, "term a_n as a formula in n");
  sub->add_option("--param", c.params, "parameter binding NAME=VALUE (repeatable)");
  sub->add_option("--corpus", c.corpus, "use a named corpus entry instead of an expression");
  sub->add_option("--w", c.w, "scale: auto, n, ln, lnln, log_K, n^s or a formula");
  sub->add_option("--kmax", c.kmax, "deepest hierarchy level")->check(CLI::Range(1, 1000));
  sub->add_option("--precision", c.precision, "significand bits");
  sub->add_option("--grid", c.grid, "geometric:start,ratio,count or tower:level,r0,step,count");
  sub->add_option("--form", c.form, "hierarchy form")->check(CLI::IsMember({"quotient", "difference"}));
  sub->add_option("--backend", c.backend, "evaluation backend")->check(CLI::IsMember({"auto", "symbolic", "numeric"}));
  sub->add_option("--expect", c.expect, "expected verdict")->check(CLI::IsMember({"converges", "diverges"}));
  sub->add_flag("--json", c.json, "print the JSON report");
}

void add_oracle_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--budget", c.budget, "maximum number of summed terms");
  sub->add_option("--checkpoints", c.checkpoints, "checkpoint indices N")->delimiter(',');
  sub->add_option("--method", c.method, "summation")->check(CLI::IsMember({"compensated", "pairwise"}));
  sub->add_option("--csv", c.csv, "write (N, S(N)) checkpoints as CSV to FILE, or - for stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence analysis of positive series"};
  app.require_subcommand(1);
  RunConfig c;

  auto* analyze = app.add_subcommand("analyze", "run the test ladder");
  add_analysis_flags(analyze, c);

  auto* sum = app.add_subcommand("sum", "partial or tail sums by direct summation");
  sum->add_option("expression", c.expr, "term a_n as a formula in n");
  sum->add_option("--param", c.params, "parameter binding NAME=VALUE (repeatable)");
  sum->add_option("--corpus", c.corpus, "use a named corpus entry instead of an expression");
  sum->add_option("--tail", c.tail_from, "sum the tail from this index instead");
  sum->add_flag("--json", c.json, "print JSON");
  add_oracle_flags(sum, c);

  auto* verify = app.add_subcommand("verify", "analyze, then check the predicted rate against sums");
  add_analysis_flags(verify, c);
  add_oracle_flags(verify, c);
  verify->add_option("--tolerance", c.tolerance, "relative tolerance of the rate check");

  auto* examples = app.add_subcommand("examples", "run the built-in corpus");
  examples->add_flag("--json", c.json, "print JSON");
  examples->add_option("--backend", c.backend, "evaluation backend")
      ->check(CLI::IsMember({"auto", "symbolic", "numeric"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*analyze) return cmd_analyze(c);
    if (*sum) return cmd_sum(c);
    if (*verify) return cmd_verify(c);
    if (*examples) return cmd_examples(c);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
