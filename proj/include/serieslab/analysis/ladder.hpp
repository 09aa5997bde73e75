#pragma once

// The escalation ladder: Raabe, log tests at w = n and w = ln n, the
// slow-log test, then the hierarchy at the scale where -1 occurred.

#include <optional>
#include <string>

#include "serieslab/analysis/tests.hpp"

namespace serieslab::analysis {

struct Policy {
  std::optional<ScaleFn> w;  // pinned scale; nullopt lets the ladder choose
  int k_max = 4;
  Form form = Form::Quotient;
  Options options;
};

namespace detail {

inline std::string discrepancy_warning(const Verdict& v) {
  const std::string b = v.exact ? expr::to_string(*v.exact) : v.statistic.value.to_string(8);
  const std::string e = v.rate ? v.rate->parameter_text() : "?";
  return "rate exponent at hierarchy level " + std::to_string(v.level) + " (beta = " + b +
         "): the level rule gives ln(sum_{i<=n} a_i) / ln_(" + std::to_string(v.level + 1) + ") w(n) -> beta + 1 = " +
         e + ", while the worked example of this case states the limit 0; the level rule is reported";
}

}  // namespace detail

inline AnalysisReport ladder(const Sequence& s, const Policy& pol) {
  const Options& opt = pol.options;
  if (pol.k_max < 1 || pol.k_max > static_cast<int>(opt.precision.max_tower_level) - 2)
    throw InvalidArgument("k_max must lie in [1, max_tower_level - 2]");

  AnalysisReport rep;
  rep.sequence = s.text();
  rep.params = s.bindings();
  rep.n0 = std::to_string(s.n0());
  if (s.log_power()) {
    rep.normal_form = expr::print(s.log_power()->to_expr());
    rep.exponents = s.log_power()->p;
  }
  const bool symbolic = opt.backend != Backend::Numeric && s.is_formula() && s.log_power().has_value() &&
                        (!pol.w || pol.w->is_catalog());
  if (opt.backend == Backend::Symbolic && !symbolic)
    throw InvalidArgument("symbolic backend needs a log-power sequence and a catalog scale");
  rep.backend = symbolic ? "symbolic" : "numeric";

  if (pol.w && !pol.w->is_catalog()) {
    const auto grid = limits::make_grid(GridSchedule::geometric(1000, 10, 8), opt.precision);
    pol.w->check_assumptions(grid);
    rep.warnings.push_back("scale " + pol.w->name() + " passed numeric assumption checks only");
  }

  auto push = [&rep](Verdict v) {
    rep.trace.push_back(std::move(v));
    return rep.trace.back().decisive();
  };
  // A statistic without a limit gets the limsup/liminf version.
  auto push_with_fallback = [&](Verdict v, const ScaleFn& w) {
    const bool unsettled = !v.decisive() && v.statistic.status == Status::NotConverged;
    if (push(std::move(v))) return true;
    return unsettled && push(one_sided(s, w, opt));
  };

  const ScaleFn ln = ScaleFn::iter_log(1);
  const ScaleFn W = pol.w ? *pol.w : ln;
  bool done = false;
  if (!pol.w) done = push_with_fallback(raabe(s, opt), ScaleFn::identity());
  std::vector<ScaleFn> scales;
  if (pol.w) scales = {*pol.w};
  else scales = {ScaleFn::identity(), ln};
  for (const auto& w : scales) {
    if (done) break;
    done = push_with_fallback(
        pol.form == Form::Quotient ? increment_log_test(s, w, opt) : increment_ratio_test(s, w, opt), w);
  }
  if (!done) done = push(pol.form == Form::Quotient ? slow_log(s, W, opt) : slow_log_telescoped(s, W, opt));
  for (int L = 1; L <= pol.k_max && !done; ++L) done = push(hierarchy_level(s, W, L, pol.form, opt));

  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    const Verdict& v = rep.trace[i];
    if (v.absorbed) rep.warnings.push_back("absorption while sampling " + v.test + ": dominant operand kept");
    if (v.decisive() && !rep.final_index) rep.final_index = i;
  }
  if (rep.final_index) {
    const Verdict& f = rep.trace[*rep.final_index];
    rep.final_decision = f.decision;
    rep.final_reason = f.test + (f.level ? " level " + std::to_string(f.level) : "") + ": " + f.reason;
    if (f.test == "hierarchy_quotient" && f.level >= 2 && f.decision == Decision::Diverges && !f.one_sided)
      rep.warnings.push_back(detail::discrepancy_warning(f));
    if (f.test == "slow_log_telescoped" && f.rate && f.rate->tmpl == RateTemplate::SlowLogUnknown)
      rep.warnings.push_back("the constant E of the slow-log rate is not determined by the limit; verify estimates it "
                             "from partial sums");
  } else {
    rep.final_decision = Decision::Inconclusive;
    rep.final_reason = "exhausted";
  }
  return rep;
}

}  // namespace serieslab::analysis
