#pragma once

// Decision procedures: Raabe, log tests over a scale w, the undecided-case
// hierarchies in quotient and difference form, one-sided variants and
// O-regular bounds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "serieslab/analysis/verdict.hpp"

namespace serieslab::analysis {

enum class Backend { Auto, Symbolic, Numeric };
enum class Form { Quotient, Difference };

inline const char* to_string(Form f) { return f == Form::Quotient ? "quotient" : "difference"; }

struct Options {
  Backend backend = Backend::Auto;
  Precision precision;
  std::optional<GridSchedule> grid;  // overrides the per-statistic default
  double margin = 1e-3;              // |theta + 1| <= margin counts as undecided
};

// ---- statistics ------------------------------------------------------------

namespace stats {

inline LogExpr log_w(const ScaleFn& w, int i) {
  LogExpr e;
  e.add(w.iter_log_of_w(i));
  return e;
}

/// ln(w(n) ln w(n) ... ln_(L-1) w(n) a_n / dw(n))
inline LogExpr normalized_log(const Sequence& s, const ScaleFn& w, int L) {
  LogExpr e(s.bindings());
  e.add_sequence(s);
  e.add_log_delta(w, -1);
  for (int i = 1; i <= L; ++i) e.add(w.iter_log_of_w(i));
  return e;
}

inline Statistic log_ratio(const Sequence& s, const ScaleFn& w) {
  LogExpr num(s.bindings());
  num.add_sequence(s);
  return Statistic(Statistic::Shape::Quotient, num, log_w(w, 1));
}

/// Level 0 is ln(a_n/dw)/ln w; level L >= 1 is the hierarchy statistic
/// with denominator ln_(L+1) w.
inline Statistic quotient(const Sequence& s, const ScaleFn& w, int L) {
  return Statistic(Statistic::Shape::Quotient, normalized_log(s, w, L), log_w(w, L + 1));
}

inline Statistic difference(const Sequence& s, const ScaleFn& w, int L) {
  return Statistic(Statistic::Shape::Difference, normalized_log(s, w, L), log_w(w, L + 1));
}

inline Statistic raabe(const Sequence& s) {
  LogExpr num(s.bindings());
  num.add_sequence(s);
  return Statistic(Statistic::Shape::Raabe, num);
}

/// w(n) a_n / dw(n)
inline Statistic slow_log(const Sequence& s, const ScaleFn& w) {
  return Statistic(Statistic::Shape::Exp, normalized_log(s, w, 1));
}

/// d ln a_n / d ln w(n), the statistic behind O-regular bounds.
inline Statistic log_increment_ratio(const Sequence& s, const ScaleFn& w) {
  LogExpr num(s.bindings());
  num.add_sequence(s);
  return Statistic(Statistic::Shape::Difference, num, log_w(w, 1));
}

}  // namespace stats

// ---- evaluation ------------------------------------------------------------

struct Evaluation {
  LimitEstimate estimate;
  std::optional<ExactLimit> exact;
  bool absorbed = false;
  std::vector<Sample> samples;
};

inline bool use_symbolic(const Sequence& s, const ScaleFn& w, const Statistic& st, const Options& opt) {
  const bool possible = s.is_formula() && s.log_power().has_value() && w.is_catalog() && st.symbolic();
  if (opt.backend == Backend::Symbolic && !possible)
    throw InvalidArgument("symbolic backend needs a log-power sequence and a catalog scale");
  return possible && opt.backend != Backend::Numeric;
}

inline GridSchedule grid_for(const Statistic& st, const Sequence& s, const Options& opt) {
  return opt.grid ? *opt.grid : default_grid(st, s.n0(), opt.precision);
}

namespace detail {

/// Callable terms may depend on the parity of n, which a grid of even
/// points never sees. The estimate stands only if the grid shifted by one
/// agrees with it.
inline LimitEstimate parity_checked(const Statistic& st, const std::vector<ExtScalar>& grid, const LimitEstimate& e) {
  std::vector<ExtScalar> shifted;
  for (const auto& n : grid)
    if (n.is_plain()) shifted.push_back(n + ExtScalar(1L, n.precision_config()));
  if (shifted.size() < 3) return e;
  const LimitEstimate o = limits::estimate_limit(sample(st, shifted).samples);
  bool agree = o.status == e.status;
  if (agree && e.converged()) {
    const double a = e.value.to_double(), b = o.value.to_double();
    const double tol = std::max({10 * (e.uncertainty.to_double() + o.uncertainty.to_double()),
                                 1e-6 * std::max(1.0, std::fabs(a))});
    agree = std::fabs(a - b) <= tol;
  }
  if (agree) return e;
  LimitEstimate out = e;
  out.status = Status::NotConverged;
  return out;
}

}  // namespace detail

inline Evaluation evaluate(const Statistic& st, const Sequence& s, const ScaleFn& w, const Options& opt) {
  Evaluation ev;
  if (use_symbolic(s, w, st, opt)) {
    ev.exact = st.exact_limit();
    ev.estimate = ev.exact->estimate(opt.precision);
    return ev;
  }
  const GridSchedule g = grid_for(st, s, opt);
  const auto grid = limits::make_grid(g, opt.precision);
  const SampleRun run = sample(st, grid);
  ev.samples = run.samples;
  ev.absorbed = run.absorbed;
  ev.estimate = limits::estimate_limit(run.samples);
  if (!s.is_formula()) ev.estimate = detail::parity_checked(st, grid, ev.estimate);
  ev.estimate.grid = g.to_string();
  return ev;
}

// ---- decisions ---------------------------------------------------------------

struct Classified {
  Decision decision = Decision::Inconclusive;
  std::string reason;
  bool one_sided = false;
};

/// Trichotomy around -1 with a guard band.
inline Classified classify(const LimitEstimate& e, const std::optional<Rational>& exact, double margin) {
  switch (e.status) {
    case Status::DivergedNeg: return {Decision::Converges, "statistic tends to -inf", true};
    case Status::DivergedPos: return {Decision::Diverges, "statistic tends to +inf", true};
    case Status::NotConverged: return {Decision::Inconclusive, "statistic-not-convergent", false};
    case Status::Converged: break;
  }
  if (exact) {
    if (*exact == -1) return {Decision::Inconclusive, "statistic equals -1", false};
    return *exact < -1 ? Classified{Decision::Converges, "statistic below -1", false}
                       : Classified{Decision::Diverges, "statistic above -1", false};
  }
  const double v = e.value.to_double();
  const double u = e.uncertainty.to_double();
  const double dist = std::fabs(v + 1);
  if (dist <= margin) return {Decision::Inconclusive, "statistic equals -1 within margin", false};
  if (dist <= u) return {Decision::Inconclusive, "uncertainty covers -1", false};
  return v < -1 ? Classified{Decision::Converges, "statistic below -1", false}
                : Classified{Decision::Diverges, "statistic above -1", false};
}

namespace detail {

inline Verdict make_verdict(std::string test, const ScaleFn& w, int level, const Evaluation& ev, double margin) {
  Verdict v;
  v.test = std::move(test);
  v.w = w.name();
  v.level = level;
  v.statistic = ev.estimate;
  v.symbolic = ev.exact.has_value();
  v.absorbed = ev.absorbed;
  if (ev.exact && ev.exact->q) v.exact = ev.exact->q;
  const Classified c = classify(ev.estimate, v.exact, margin);
  v.decision = c.decision;
  v.reason = c.reason;
  v.one_sided = c.one_sided;
  return v;
}

/// Rate attached to a decisive two-sided verdict. `exponent_shift` is 1 for
/// the log templates (theta + 1) and 0 for the precise ones (theta).
inline void attach_rate(Verdict& v, const ScaleFn& w, RateTemplate tail, RateTemplate partial, int log_depth,
                        int exponent_shift, const Precision& p) {
  if (!v.decisive() || v.one_sided) return;
  RatePrediction r;
  r.tmpl = v.decision == Decision::Converges ? tail : partial;
  r.w = w;
  r.log_depth = log_depth;
  if (v.exact) {
    r.exact = *v.exact + exponent_shift;
    r.parameter = expr::to_ext(*r.exact, p);
  } else {
    r.parameter = v.statistic.value + ExtScalar(static_cast<long>(exponent_shift), p);
  }
  v.rate = r;
}

}  // namespace detail

// ---- tests -------------------------------------------------------------------

/// theta = lim n (a_{n+1}/a_n - 1).
inline Verdict raabe(const Sequence& s, const Options& opt = {}) {
  const ScaleFn w = ScaleFn::identity();
  const Evaluation ev = evaluate(stats::raabe(s), s, w, opt);
  Verdict v = detail::make_verdict("raabe", w, 0, ev, opt.margin);
  detail::attach_rate(v, w, RateTemplate::PreciseTail, RateTemplate::PrecisePartial, 1, 0, opt.precision);
  return v;
}

/// theta = lim ln a_n / ln w(n).
inline Verdict log_test(const Sequence& s, const ScaleFn& w, const Options& opt = {}) {
  const Evaluation ev = evaluate(stats::log_ratio(s, w), s, w, opt);
  Verdict v = detail::make_verdict("log", w, 0, ev, opt.margin);
  detail::attach_rate(v, w, RateTemplate::LogRatioTail, RateTemplate::LogRatioPartial, 1, 1, opt.precision);
  return v;
}

/// theta = lim ln(a_n / dw(n)) / ln w(n).
inline Verdict increment_log_test(const Sequence& s, const ScaleFn& w, const Options& opt = {}) {
  const Evaluation ev = evaluate(stats::quotient(s, w, 0), s, w, opt);
  Verdict v = detail::make_verdict("increment_log", w, 0, ev, opt.margin);
  detail::attach_rate(v, w, RateTemplate::LogRatioTail, RateTemplate::LogRatioPartial, 1, 1, opt.precision);
  return v;
}

/// theta = lim d ln(a_n / dw(n)) / d ln w(n), with precise rates.
inline Verdict increment_ratio_test(const Sequence& s, const ScaleFn& w, const Options& opt = {}) {
  const Evaluation ev = evaluate(stats::difference(s, w, 0), s, w, opt);
  Verdict v = detail::make_verdict("increment_ratio", w, 0, ev, opt.margin);
  detail::attach_rate(v, w, RateTemplate::PreciseTail, RateTemplate::PrecisePartial, 1, 0, opt.precision);
  return v;
}

/// alpha(n) = ln(a_n / dw(n)) / ln w(n) at a single n.
inline ExtScalar alpha_statistic(const Sequence& s, const ScaleFn& w, const ExtScalar& n) {
  if (n.is_plain() && n.to_double() < static_cast<double>(s.n0()))
    throw DomainError("n is below the domain start " + std::to_string(s.n0()));
  return stats::quotient(s, w, 0).at(n);
}

namespace detail {

/// Shared by the two slow-log tests: g(n) = w(n) a_n / dw(n).
struct SlowLogOutcome {
  enum class Kind { Limit, BoundedBelow, ToZero, Unknown } kind = Kind::Unknown;
  LimitEstimate g;
  std::optional<ExtScalar> bound;  // B with g >= B on the grid
  bool symbolic = false;
};

inline SlowLogOutcome slow_log_outcome(const Sequence& s, const ScaleFn& w, const Options& opt) {
  const Statistic st = stats::slow_log(s, w);
  SlowLogOutcome out;
  if (use_symbolic(s, w, st, opt)) {
    out.symbolic = true;
    const ExactLimit L = st.exact_limit();
    out.g = L.estimate(opt.precision);
    if (L.infinite > 0) out.kind = SlowLogOutcome::Kind::BoundedBelow;
    else if (L.x) out.kind = SlowLogOutcome::Kind::Limit;
    else out.kind = SlowLogOutcome::Kind::ToZero;
    return out;
  }
  // Estimate on ln g, which is where the sampled values are well scaled.
  const GridSchedule gs = grid_for(st, s, opt);
  std::vector<Sample> samples;
  for (const auto& n : limits::make_grid(gs, opt.precision)) samples.push_back({n, st.numer().value(n)});
  LimitEstimate e = limits::estimate_limit(samples);
  e.grid = gs.to_string();
  ExtScalar lo = samples.front().value;
  for (const auto& x : samples) lo = numeric::min(lo, x.value);
  switch (e.status) {
    case Status::Converged: {
      out.kind = SlowLogOutcome::Kind::Limit;
      const ExtScalar C = numeric::ext_exp(e.value);
      out.g = e;
      out.g.value = C;
      out.g.uncertainty = C * numeric::ext_expm1(e.uncertainty);
      return out;
    }
    case Status::DivergedPos:
      out.kind = SlowLogOutcome::Kind::BoundedBelow;
      out.g = e;
      out.bound = numeric::ext_exp(lo);
      return out;
    case Status::DivergedNeg:
      out.kind = SlowLogOutcome::Kind::ToZero;
      out.g = e;
      return out;
    case Status::NotConverged: {
      // Bounded below when the second half never dips under the first.
      const std::size_t h = samples.size() / 2;
      ExtScalar first = samples[0].value, second = samples[h].value;
      for (std::size_t i = 0; i < h; ++i) first = numeric::min(first, samples[i].value);
      for (std::size_t i = h; i < samples.size(); ++i) second = numeric::min(second, samples[i].value);
      out.g = e;
      if (compare(second, first) >= 0) {
        out.kind = SlowLogOutcome::Kind::BoundedBelow;
        out.bound = numeric::ext_exp(lo);
      }
      return out;
    }
  }
  return out;
}

inline Verdict slow_log_verdict(const std::string& test, const Sequence& s, const ScaleFn& w, const Options& opt,
                                bool constant_known) {
  const SlowLogOutcome o = slow_log_outcome(s, w, opt);
  Verdict v;
  v.test = test;
  v.w = w.name();
  v.level = 0;
  v.statistic = o.g;
  v.symbolic = o.symbolic;
  RatePrediction r;
  r.w = w;
  switch (o.kind) {
    case SlowLogOutcome::Kind::Limit:
      v.decision = Decision::Diverges;
      v.reason = "w(n) a_n / dw(n) tends to a positive constant";
      r.tmpl = constant_known ? RateTemplate::SlowLog : RateTemplate::SlowLogUnknown;
      r.parameter = o.g.value;
      v.rate = r;
      break;
    case SlowLogOutcome::Kind::BoundedBelow:
      v.decision = Decision::Diverges;
      v.reason = "w(n) a_n / dw(n) stays bounded away from 0";
      v.one_sided = true;
      r.tmpl = RateTemplate::SlowLogLower;
      if (o.bound) r.parameter = *o.bound;
      v.rate = r;
      break;
    case SlowLogOutcome::Kind::ToZero:
      v.decision = Decision::Inconclusive;
      v.reason = "w(n) a_n / dw(n) tends to 0";
      if (o.symbolic) v.exact = Rational(0);
      break;
    case SlowLogOutcome::Kind::Unknown:
      v.decision = Decision::Inconclusive;
      v.reason = "w(n) a_n / dw(n) has no detectable limit or lower bound";
      break;
  }
  return v;
}

}  // namespace detail

/// Undecided-case test on g(n) = w(n) a_n / dw(n): a positive limit C gives
/// partial sums ~ C ln w(n); a positive lower bound gives divergence.
inline Verdict slow_log(const Sequence& s, const ScaleFn& w, const Options& opt = {}) {
  return detail::slow_log_verdict("slow_log", s, w, opt, true);
}

/// Difference-form counterpart: exp of the summed increments of
/// (alpha(i) + 1) d ln w(i) telescopes to g(N)/g(a), so the same limit
/// decides, but the constant of the rate is not recoverable from it.
inline Verdict slow_log_telescoped(const Sequence& s, const ScaleFn& w, const Options& opt = {}) {
  return detail::slow_log_verdict("slow_log_telescoped", s, w, opt, false);
}

/// One level of the undecided-case hierarchy (L >= 1).
inline Verdict hierarchy_level(const Sequence& s, const ScaleFn& w, int L, Form form, const Options& opt = {}) {
  if (L < 1) throw InvalidArgument("hierarchy levels start at 1");
  if (L > static_cast<int>(opt.precision.max_tower_level) - 2)
    throw InvalidArgument("hierarchy level exceeds max_tower_level - 2");
  const Statistic st = form == Form::Quotient ? stats::quotient(s, w, L) : stats::difference(s, w, L);
  const Evaluation ev = evaluate(st, s, w, opt);
  Verdict v = detail::make_verdict(form == Form::Quotient ? "hierarchy_quotient" : "hierarchy_difference", w, L, ev,
                                   opt.margin);
  detail::attach_rate(v, w, RateTemplate::LogLogTail, RateTemplate::LogLogPartial, L + 1, 1, opt.precision);
  return v;
}

/// Levels 1..k_max, stopping at the first decisive one.
inline std::vector<Verdict> hierarchy(const Sequence& s, const ScaleFn& w, int k_max, Form form,
                                      const Options& opt = {}) {
  if (k_max < 1 || k_max > static_cast<int>(opt.precision.max_tower_level) - 2)
    throw InvalidArgument("k_max must lie in [1, max_tower_level - 2]");
  std::vector<Verdict> out;
  for (int L = 1; L <= k_max; ++L) {
    out.push_back(hierarchy_level(s, w, L, form, opt));
    if (out.back().decisive()) break;
  }
  return out;
}

/// limsup < -1 gives convergence, liminf > -1 divergence; no rates.
inline Verdict one_sided(const Sequence& s, const ScaleFn& w, const Options& opt = {}) {
  const Statistic st = stats::quotient(s, w, 0);
  Verdict v;
  v.test = "one_sided";
  v.w = w.name();
  v.one_sided = true;
  LimitEstimate sup, inf;
  if (use_symbolic(s, w, st, opt)) {
    const ExactLimit L = st.exact_limit();
    sup = inf = L.estimate(opt.precision);
    v.symbolic = true;
    if (L.q) v.exact = L.q;
  } else {
    const GridSchedule g = grid_for(st, s, opt);
    const SampleRun run = sample_pairs(st, limits::make_grid(g, opt.precision));
    std::tie(sup, inf) = limits::estimate_limsup_liminf(run.samples);
    sup.grid = inf.grid = g.to_string();
  }
  const double m = opt.margin;
  auto below = [&](const LimitEstimate& e) {
    if (e.status == Status::DivergedNeg) return true;
    if (!e.converged()) return false;
    return e.value.to_double() < -1 - std::max(m, e.uncertainty.to_double());
  };
  auto above = [&](const LimitEstimate& e) {
    if (e.status == Status::DivergedPos) return true;
    if (!e.converged()) return false;
    return e.value.to_double() > -1 + std::max(m, e.uncertainty.to_double());
  };
  if (below(sup)) {
    v.decision = Decision::Converges;
    v.reason = "limsup of the statistic is below -1";
    v.statistic = sup;
    v.other = inf;
  } else if (above(inf)) {
    v.decision = Decision::Diverges;
    v.reason = "liminf of the statistic is above -1";
    v.statistic = inf;
    v.other = sup;
  } else {
    v.decision = Decision::Inconclusive;
    v.reason = "limsup and liminf do not separate from -1";
    v.statistic = sup;
    v.other = inf;
  }
  return v;
}

struct ORegularBand {
  double t = 1;
  double lower = 1;  // t^alpha
  double upper = 1;  // t^beta
  std::vector<double> empirical;
  bool violation = false;
};

struct ORegularReport {
  LimitEstimate alpha;  // liminf of d ln a / d ln w
  LimitEstimate beta;   // limsup
  std::vector<ORegularBand> bands;
};

/// Power sandwich t^alpha <= f(tx)/f(x) <= t^beta for f(x) = a_[x], with
/// empirical ratios as a diagnostic. A flagged violation points at
/// estimator uncertainty, not at a failed bound.
inline ORegularReport o_regular_bounds(const Sequence& s, const ScaleFn& w, const std::vector<double>& ts,
                                       const Options& opt = {}, double tolerance = 0.05) {
  for (double t : ts)
    if (!(t >= 1)) throw InvalidArgument("O-regular bounds need t >= 1");
  const Statistic st = stats::log_increment_ratio(s, w);
  ORegularReport rep;
  if (use_symbolic(s, w, st, opt)) {
    rep.alpha = rep.beta = st.exact_limit().estimate(opt.precision);
  } else {
    const GridSchedule g = opt.grid ? *opt.grid : GridSchedule::geometric(
        std::max<long double>(1000.0L, static_cast<long double>(grid_floor(s.n0()))), 10, 12);
    const SampleRun run = sample_pairs(st, limits::make_grid(g, opt.precision));
    std::tie(rep.beta, rep.alpha) = limits::estimate_limsup_liminf(run.samples);
  }
  const double inf = std::numeric_limits<double>::infinity();
  auto power = [&](double t, const LimitEstimate& e) {
    if (t == 1) return 1.0;
    if (e.status == Status::DivergedPos) return inf;
    if (e.status == Status::DivergedNeg) return 0.0;
    if (!e.converged()) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(t, e.value.to_double());
  };
  const long long x0 = std::max<long long>(1000, grid_floor(s.n0()));
  for (double t : ts) {
    ORegularBand b;
    b.t = t;
    b.lower = power(t, rep.alpha);
    b.upper = power(t, rep.beta);
    for (long long x = x0; x <= x0 * 100000; x *= 10) {
      for (long long y : {x, x + 1}) {
        const auto ty = static_cast<long long>(std::floor(t * static_cast<double>(y)));
        const ExtScalar r = numeric::ext_exp(s.ln_term(ExtScalar(static_cast<long>(ty), opt.precision)) -
                                             s.ln_term(ExtScalar(static_cast<long>(y), opt.precision)));
        const double q = r.to_double();
        b.empirical.push_back(q);
        if ((!std::isnan(b.lower) && q < b.lower * (1 - tolerance)) ||
            (!std::isnan(b.upper) && q > b.upper * (1 + tolerance)))
          b.violation = true;
      }
    }
    rep.bands.push_back(b);
  }
  return rep;
}

}  // namespace serieslab::analysis
