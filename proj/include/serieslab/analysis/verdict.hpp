#pragma once

#include <optional>
#include <string>
#include <vector>

#include "serieslab/analysis/statistic.hpp"

namespace serieslab::analysis {

enum class Decision { Converges, Diverges, Inconclusive };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::Converges: return "converges";
    case Decision::Diverges: return "diverges";
    case Decision::Inconclusive: return "inconclusive";
  }
  return "?";
}

enum class RateTemplate {
  LogRatioTail,     // ln(sum_{i>=n} a_i) / ln w(n) -> theta + 1
  LogRatioPartial,  // ln(sum_{i<=n} a_i) / ln w(n) -> theta + 1
  PreciseTail,      // sum_{i>=n} a_i ~ -(w/dw) a_n / (1 + theta)
  PrecisePartial,   // sum_{i<=n} a_i ~ (w/dw) a_n / (1 + theta)
  LogLogTail,       // ln(tail) / ln_(j) w(n) -> beta + 1
  LogLogPartial,    // ln(partial) / ln_(j) w(n) -> beta + 1
  SlowLog,          // partial ~ C ln w(n)
  SlowLogLower,     // partial >= c ln w(n) eventually, c > 0
  SlowLogUnknown    // partial ~ E ln w(n) for some E > 0
};

inline const char* to_string(RateTemplate t) {
  switch (t) {
    case RateTemplate::LogRatioTail: return "log_ratio_tail";
    case RateTemplate::LogRatioPartial: return "log_ratio_partial";
    case RateTemplate::PreciseTail: return "precise_tail";
    case RateTemplate::PrecisePartial: return "precise_partial";
    case RateTemplate::LogLogTail: return "loglog_tail";
    case RateTemplate::LogLogPartial: return "loglog_partial";
    case RateTemplate::SlowLog: return "slow_log";
    case RateTemplate::SlowLogLower: return "slow_log_lower";
    case RateTemplate::SlowLogUnknown: return "slow_log_unknown_constant";
  }
  return "?";
}

struct RatePrediction {
  RateTemplate tmpl = RateTemplate::PreciseTail;
  // theta for the precise templates, the exponent theta+1 or beta+1 for the
  // log templates, C for SlowLog; unused for the constant-free templates.
  ExtScalar parameter;
  std::optional<Rational> exact;
  ScaleFn w = ScaleFn::identity();
  int log_depth = 1;  // j in ln_(j) w(n)

  bool tail() const {
    return tmpl == RateTemplate::LogRatioTail || tmpl == RateTemplate::PreciseTail || tmpl == RateTemplate::LogLogTail;
  }

  std::string parameter_text() const {
    if (exact) return expr::to_string(*exact);
    return parameter.to_string(12);
  }

  std::string formula() const {
    const std::string W = w.name() == "n" ? "n" : w.name() + "(n)";
    std::string lw = "ln_(" + std::to_string(log_depth) + ") " + W;
    if (log_depth == 1) lw = "ln " + W;
    const std::string dw = w.kind() == ScaleFn::Kind::Identity ? "n a_n" : "(w(n)/dw(n)) a_n";
    const std::string p = parameter_text();
    switch (tmpl) {
      case RateTemplate::LogRatioTail: return "ln(sum_{i>=n} a_i) / " + lw + " -> " + p;
      case RateTemplate::LogRatioPartial: return "ln(sum_{i<=n} a_i) / " + lw + " -> " + p;
      case RateTemplate::PreciseTail: return "sum_{i>=n} a_i ~ -" + dw + " / (1 + (" + p + "))";
      case RateTemplate::PrecisePartial: return "sum_{i<=n} a_i ~ " + dw + " / (1 + (" + p + "))";
      case RateTemplate::LogLogTail: return "ln(sum_{i>=n} a_i) / " + lw + " -> " + p;
      case RateTemplate::LogLogPartial: return "ln(sum_{i<=n} a_i) / " + lw + " -> " + p;
      case RateTemplate::SlowLog: return "sum_{i<=n} a_i ~ " + p + " ln " + W;
      case RateTemplate::SlowLogLower: return "sum_{i<=n} a_i >= c ln " + W + " eventually, some c > 0";
      case RateTemplate::SlowLogUnknown: return "sum_{i<=n} a_i ~ E ln " + W + " for some E > 0";
    }
    return "";
  }
};

struct Verdict {
  std::string test;
  std::string w;
  int level = 0;
  Decision decision = Decision::Inconclusive;
  std::string reason;
  LimitEstimate statistic;
  std::optional<Rational> exact;       // exact statistic value (symbolic backend)
  std::optional<LimitEstimate> other;  // liminf beside a limsup, for one-sided checks
  std::optional<RatePrediction> rate;
  bool one_sided = false;
  bool symbolic = false;
  bool absorbed = false;

  bool decisive() const { return decision != Decision::Inconclusive; }
};

struct AnalysisReport {
  std::string sequence;
  std::optional<std::string> normal_form;
  std::vector<Rational> exponents;  // log-power exponents when the form exists
  std::string n0;
  Bindings params;
  std::string backend;  // "symbolic" or "numeric"
  std::vector<Verdict> trace;
  Decision final_decision = Decision::Inconclusive;
  std::string final_reason;
  std::optional<std::size_t> final_index;  // into trace
  std::vector<std::string> warnings;
};

}  // namespace serieslab::analysis
