#pragma once

// Brute-force partial and tail sums at desk scale, and checks of rate
// predictions against them. Terms are evaluated in long double and summed
// with Neumaier compensation (or pairwise, as a cross-check) over chunks of
// fixed size whose results merge in a fixed tree order.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "serieslab/analysis/verdict.hpp"
#include "serieslab/error.hpp"
#include "serieslab/expr/sequence.hpp"

namespace serieslab::oracle {

using analysis::RatePrediction;
using analysis::RateTemplate;
using expr::Sequence;
using numeric::ExtScalar;
using numeric::Real;
using scale::ScaleFn;

enum class Method { Compensated, Pairwise };

inline const char* to_string(Method m) { return m == Method::Compensated ? "compensated" : "pairwise"; }

struct Config {
  long long budget = 100'000'000;
  Method method = Method::Compensated;
};

inline constexpr long long kChunk = 65536;
inline constexpr long double kEps = std::numeric_limits<long double>::epsilon();

struct SumResult {
  long long first = 0;  // summation range [first, last]
  long long last = 0;
  long long n_terms = 0;
  bool tail = false;  // value is the tail from `first`, else the partial sum to `last`
  long double value = 0;  // window sum plus remainder
  Method method = Method::Compensated;
  long double estimated_roundoff = 0;
  // tail sums only: integral estimate of sum_{i>last} a_i and its error bound
  std::optional<long double> remainder;
  long double truncation_bound = 0;
};

namespace detail {

struct Acc {
  long double s = 0, c = 0;

  void add(long double x) {
    const long double t = s + x;
    c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  void merge(const Acc& o) {
    add(o.s);
    c += o.c;
  }
  long double value() const { return s + c; }
};

inline long double term(const Sequence& s, long long i) {
  const long double a = s.term_ld(i);
  if (!(a > 0) || !std::isfinite(a))
    throw DomainError("term a_" + std::to_string(i) + " is not a positive finite number");
  return a;
}

inline long double pairwise(const long double* x, std::size_t n) {
  if (n <= 32) {
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(x, h) + pairwise(x + h, n - h);
}

/// Chunk results reduced as a balanced tree: the order depends only on the
/// number of chunks.
template <class T, class F>
T tree_reduce(std::vector<T> v, F merge) {
  if (v.empty()) return T{};
  while (v.size() > 1) {
    std::vector<T> next;
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(merge(v[i], v[i + 1]));
    if (v.size() % 2) next.push_back(v.back());
    v = std::move(next);
  }
  return v[0];
}

/// Sum of a_i over [a, b] (b >= a - 1; empty when b < a).
inline long double window(const Sequence& s, long long a, long long b, Method m) {
  if (b < a) return 0;
  std::vector<long double> buf;
  if (m == Method::Pairwise) buf.resize(kChunk);
  std::vector<Acc> comp;
  std::vector<long double> pair;
  for (long long lo = a; lo <= b; lo += kChunk) {
    const long long hi = std::min(b, lo + kChunk - 1);
    if (m == Method::Compensated) {
      Acc acc;
      for (long long i = lo; i <= hi; ++i) acc.add(term(s, i));
      comp.push_back(acc);
    } else {
      const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
      for (std::size_t k = 0; k < n; ++k) buf[k] = term(s, lo + static_cast<long long>(k));
      pair.push_back(pairwise(buf.data(), n));
    }
  }
  if (m == Method::Compensated)
    return tree_reduce(comp, [](Acc x, const Acc& y) { x.merge(y); return x; }).value();
  return tree_reduce(pair, [](long double x, long double y) { return x + y; });
}

/// Term evaluation contributes a few ulps per term, partly cancelling;
/// summation adds eps per level for pairwise and O(eps) when compensated.
inline long double roundoff(long long n, long double value, Method m) {
  const long double nn = static_cast<long double>(std::max(1LL, n));
  long double k = 8 + 2 * std::sqrt(nn);
  if (m == Method::Pairwise) k += std::log2(nn);
  return std::min(2 * nn, k) * kEps * std::fabs(value);
}

inline void check_budget(long long terms, const Config& cfg) {
  if (terms > cfg.budget)
    throw BudgetExceeded("summation needs " + std::to_string(terms) + " terms, budget is " + std::to_string(cfg.budget));
}

}  // namespace detail

/// S(N) = sum_{i=n0}^{N} a_i at each checkpoint, in one pass.
inline std::vector<SumResult> partial_sums(const Sequence& s, std::vector<long long> checkpoints,
                                           const Config& cfg = {}) {
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.empty()) return {};
  const long long n0 = s.n0();
  if (checkpoints.front() < n0)
    throw InvalidArgument("checkpoint " + std::to_string(checkpoints.front()) + " is below n0 = " + std::to_string(n0));
  detail::check_budget(checkpoints.back() - n0 + 1, cfg);
  std::vector<SumResult> out;
  detail::Acc total;
  long long prev = n0 - 1;
  for (long long N : checkpoints) {
    total.add(detail::window(s, prev + 1, N, cfg.method));
    prev = N;
    SumResult r;
    r.first = n0;
    r.last = N;
    r.n_terms = N - n0 + 1;
    r.value = total.value();
    r.method = cfg.method;
    r.estimated_roundoff = detail::roundoff(r.n_terms, r.value, cfg.method);
    out.push_back(r);
  }
  return out;
}

inline SumResult partial_sum(const Sequence& s, long long N, const Config& cfg = {}) {
  return partial_sums(s, {N}, cfg).front();
}

/// int_{N+1/2}^inf a(x) dx, the midpoint-rule estimate of sum_{i>N} a_i.
/// Its error is below a_N - a_{N+1} for decreasing convex terms.
/// Log-power terms decay only like a power of their deepest log, so the
/// integral runs over v = ln_(k) x, with k that depth, where the
/// integrand a(x) dx/dv = exp(ln a + ln x + ... + ln_(k) x) decays fast.
inline std::optional<long double> integral_remainder(const Sequence& s, long long N) {
  if (!s.has_continuous_term()) return std::nullopt;
  const auto& L = s.log_linear_form();
  const int k = L && !L->depth.empty() ? L->depth.rbegin()->first : 0;
  const mpfr_prec_t bits = 64;
  const ExtScalar x0 = ExtScalar::from_real(Real(static_cast<long double>(N) + 0.5L, bits));
  const long double v0 = numeric::iter_ln(static_cast<unsigned>(k), x0).to_long_double();
  // the Jacobian folds into the depth coefficients, so ln x cancels
  // exactly instead of being absorbed at tower scale
  std::optional<expr::BoundLogLinear> g;
  if (k > 0) {
    expr::LogLinear M = *L;
    for (int i = 1; i <= k; ++i) M += ScaleFn::identity().iter_log_of_w(i);
    g = expr::bind(M, s.bindings(), numeric::Precision{bits, numeric::Precision{}.max_tower_level});
  }
  auto f = [&s, &g, k](long double v) -> long double {
    if (k == 0) return s.term_at(v);
    const ExtScalar x = ExtScalar::tower(static_cast<unsigned>(k), Real(v, bits));
    return numeric::ext_exp(g->eval(x, s.bindings())).to_long_double();
  };
  try {
    boost::math::quadrature::exp_sinh<long double> q;
    long double err = 0;
    const long double v =
        q.integrate(f, v0, std::numeric_limits<long double>::infinity(), std::sqrt(kEps), &err);
    if (!std::isfinite(v) || v < 0 || err > 1e-9L * v) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// Tails sum_{i=n}^{N} a_i (+ remainder past N) for several n sharing one N.
inline std::vector<SumResult> tail_sums(const Sequence& s, std::vector<long long> starts, long long N,
                                        bool with_remainder = true, const Config& cfg = {}) {
  std::sort(starts.begin(), starts.end());
  if (starts.empty()) return {};
  if (starts.front() < s.n0()) throw InvalidArgument("tail start is below n0 = " + std::to_string(s.n0()));
  if (starts.back() >= N) throw InvalidArgument("tail start must be below the window end");
  detail::check_budget(N - starts.front() + 1, cfg);

  std::optional<long double> rem;
  long double bound = 0;
  if (with_remainder) {
    rem = integral_remainder(s, N);
    if (rem) bound = std::fabs(detail::term(s, N) - detail::term(s, N + 1));
  }
  // segments summed from the far end so each tail is one running total
  std::vector<SumResult> out(starts.size());
  detail::Acc total;
  if (rem) total.add(*rem);
  long long hi = N;
  for (std::size_t k = starts.size(); k-- > 0;) {
    total.add(detail::window(s, starts[k], hi, cfg.method));
    hi = starts[k] - 1;
    SumResult& r = out[k];
    r.first = starts[k];
    r.last = N;
    r.tail = true;
    r.n_terms = N - starts[k] + 1;
    r.value = total.value();
    r.method = cfg.method;
    r.estimated_roundoff = detail::roundoff(r.n_terms, r.value, cfg.method);
    r.remainder = rem;
    r.truncation_bound = bound;
  }
  return out;
}

inline SumResult tail_sum(const Sequence& s, long long n, long long N, bool with_remainder = true,
                          const Config& cfg = {}) {
  return tail_sums(s, {n}, N, with_remainder, cfg).front();
}

// ---- rate checks ---------------------------------------------------------------

enum class FitStatus { Pass, Fail, InsufficientSignal };

inline const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Pass: return "pass";
    case FitStatus::Fail: return "fail";
    case FitStatus::InsufficientSignal: return "unverifiable-at-scale";
  }
  return "?";
}

struct Checkpoint {
  long long N = 0;
  long double sum = 0;         // S(N) or the tail from N
  long double roundoff = 0;
  long double functional = 0;  // ln w(N), ln_(j) w(N) or the predicted sum
};

struct FitReport {
  RateTemplate tmpl = RateTemplate::SlowLog;
  FitStatus status = FitStatus::Fail;
  std::string quantity;  // what the slopes or ratios measure
  std::optional<long double> predicted;
  std::vector<Checkpoint> points;
  std::vector<long double> estimates;  // slope or ratio per checkpoint pair / checkpoint
  std::optional<long double> estimate;
  double tolerance = 0.02;
  std::string message;
};

inline const std::vector<long long>& default_checkpoints() {
  static const std::vector<long long> c = {10'000, 100'000, 1'000'000, 10'000'000};
  return c;
}

namespace detail {

inline long double ld(const ExtScalar& x) { return static_cast<long double>(x.to_real().to_long_double()); }

inline long double scale_value(const ScaleFn& w, long long N) { return ld(w.value(ExtScalar(static_cast<long>(N)))); }

/// ln_(j) w(N)
inline long double log_functional(const ScaleFn& w, int j, long long N) {
  long double x = scale_value(w, N);
  for (int i = 0; i < j; ++i) {
    if (!(x > 0)) throw DomainError("iterated log of the scale is undefined at N = " + std::to_string(N));
    x = std::log(x);
  }
  return x;
}

inline int scale_depth(const ScaleFn& w) { return w.kind() == ScaleFn::Kind::IterLog ? w.k() : 0; }

/// (w(N)/dw(N)) a_N
inline long double precise_shape(const Sequence& s, const ScaleFn& w, long long N) {
  const ExtScalar n(static_cast<long>(N));
  return ld(w.value(n) / w.delta(n)) * term(s, N);
}

inline long double window_end(const std::vector<long long>& cp, const Config& cfg) {
  return static_cast<long double>(std::min(cp.back() * 4, cp.front() + cfg.budget - 1));
}

}  // namespace detail

/// Fits the checkpoint sums against the prediction. Slopes between
/// consecutive checkpoints for the log templates, ratios to the predicted
/// sum for the precise ones; the last estimate decides pass or fail.
inline FitReport slope_check(const Sequence& s, const RatePrediction& pred,
                             std::vector<long long> checkpoints = default_checkpoints(), double tolerance = 0.02,
                             const Config& cfg = {}) {
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.size() < 3) throw InvalidArgument("slope_check needs at least 3 distinct checkpoints");
  FitReport rep;
  rep.tmpl = pred.tmpl;
  rep.tolerance = tolerance;

  const auto insufficient = [&rep](const std::string& why) {
    rep.status = FitStatus::InsufficientSignal;
    rep.message = why;
    return rep;
  };
  const bool slow = pred.tmpl == RateTemplate::SlowLog || pred.tmpl == RateTemplate::SlowLogLower ||
                    pred.tmpl == RateTemplate::SlowLogUnknown;
  const bool precise = pred.tmpl == RateTemplate::PreciseTail || pred.tmpl == RateTemplate::PrecisePartial;
  const int j = slow ? 1 : pred.log_depth;
  if (!precise) {
    // deep logs barely move below the budget; no fit is attempted
    const int total_depth = j + detail::scale_depth(pred.w);
    const long double moved =
        detail::log_functional(pred.w, j, checkpoints.back()) - detail::log_functional(pred.w, j, checkpoints.front());
    if (total_depth >= 3 && std::fabs(moved) < 1)
      return insufficient("ln_(" + std::to_string(total_depth) + ") N moves by " +
                          std::to_string(static_cast<double>(moved)) + " across the checkpoints, too little to fit a rate");
  }

  const bool tail = pred.tail();
  std::vector<SumResult> sums;
  if (tail) {
    const long long end = static_cast<long long>(detail::window_end(checkpoints, cfg));
    sums = tail_sums(s, checkpoints, end, true, cfg);
    if (!sums.front().remainder) rep.message = "no integral remainder for this sequence; tails are window sums";
  } else {
    sums = partial_sums(s, checkpoints, cfg);
  }
  for (const auto& r : sums) rep.points.push_back({r.tail ? r.first : r.last, r.value,
                                                   r.estimated_roundoff + r.truncation_bound, 0});

  const long double param = detail::ld(pred.parameter);

  switch (pred.tmpl) {
    case RateTemplate::PreciseTail:
    case RateTemplate::PrecisePartial: {
      const long double denom = std::fabs(1 + param);
      rep.quantity = tail ? "tail / predicted" : "partial / predicted";
      rep.predicted = 1;
      for (auto& p : rep.points) {
        p.functional = detail::precise_shape(s, pred.w, p.N) / denom;
        rep.estimates.push_back(p.sum / p.functional);
      }
      break;
    }
    case RateTemplate::SlowLog:
    case RateTemplate::SlowLogLower:
    case RateTemplate::SlowLogUnknown:
    case RateTemplate::LogRatioTail:
    case RateTemplate::LogRatioPartial:
    case RateTemplate::LogLogTail:
    case RateTemplate::LogLogPartial: {
      for (auto& p : rep.points) p.functional = detail::log_functional(pred.w, j, p.N);
      rep.quantity = slow ? "dS / d ln w" : (tail ? "d ln(tail)" : "d ln(S)") + std::string(" / d ln_(") +
                                                std::to_string(j) + ") w";
      for (std::size_t k = 0; k + 1 < rep.points.size(); ++k) {
        const auto& a = rep.points[k];
        const auto& b = rep.points[k + 1];
        const long double dx = b.functional - a.functional;
        const long double dy = slow ? b.sum - a.sum : std::log(b.sum) - std::log(a.sum);
        const long double noise = slow ? a.roundoff + b.roundoff : (a.roundoff / a.sum + b.roundoff / b.sum);
        if (std::fabs(dx) <= 10 * kEps * std::max(1.0L, std::fabs(b.functional)) || std::fabs(dy) <= 10 * noise)
          return insufficient("the sums change less than 10x their roundoff between N = " + std::to_string(a.N) +
                              " and N = " + std::to_string(b.N));
        rep.estimates.push_back(dy / dx);
      }
      if (pred.tmpl == RateTemplate::SlowLog || !slow) rep.predicted = param;
      break;
    }
  }

  rep.estimate = rep.estimates.back();
  const long double e = *rep.estimate;
  if (pred.tmpl == RateTemplate::SlowLogLower) {
    const bool ok = std::all_of(rep.estimates.begin(), rep.estimates.end(), [](long double x) { return x > 0; });
    rep.status = ok ? FitStatus::Pass : FitStatus::Fail;
    if (rep.message.empty()) rep.message = ok ? "slopes stay positive" : "a slope is not positive";
  } else if (pred.tmpl == RateTemplate::SlowLogUnknown) {
    const long double prev = rep.estimates[rep.estimates.size() - 2];
    const bool ok = e > 0 && std::fabs(e - prev) <= tolerance * e;
    rep.status = ok ? FitStatus::Pass : FitStatus::Fail;
    if (rep.message.empty()) rep.message = "E estimated as the last slope";
  } else {
    const long double want = *rep.predicted;
    const long double scale = std::max(1.0L, std::fabs(want));
    const long double err = std::fabs(e - want) / scale;
    rep.status = err <= tolerance ? FitStatus::Pass : FitStatus::Fail;
    std::string how = "last estimate ";
    // Log templates of partial sums carry an additive constant that decays
    // like 1/w(N). With gaps to the prediction shrinking monotonically, a
    // two-point fit e = L + c/w(N) over the last segments gets a second look.
    if (rep.status == FitStatus::Fail && !precise && rep.estimates.size() >= 2) {
      bool shrinking = true;
      for (std::size_t k = 0; k + 1 < rep.estimates.size(); ++k)
        shrinking = shrinking && std::fabs(rep.estimates[k + 1] - want) < std::fabs(rep.estimates[k] - want);
      const std::size_t m = rep.estimates.size();
      auto mid_w = [&](std::size_t k) {
        return std::sqrt(detail::scale_value(pred.w, rep.points[k].N) * detail::scale_value(pred.w, rep.points[k + 1].N));
      };
      const long double w1 = mid_w(m - 2), w2 = mid_w(m - 1);
      if (shrinking && w2 > w1) {
        const long double L = (rep.estimates[m - 1] * w2 - rep.estimates[m - 2] * w1) / (w2 - w1);
        if (std::fabs(L - want) / scale <= tolerance) {
          rep.status = FitStatus::Pass;
          rep.estimate = L;
          how = "extrapolated estimate ";
        }
      }
    }
    if (rep.message.empty())
      rep.message = how + std::to_string(static_cast<double>(*rep.estimate)) + ", predicted " +
                    std::to_string(static_cast<double>(want));
  }
  return rep;
}

/// Plausibility of a verdict against partial sums: a convergent verdict
/// needs shrinking increments, a divergent one increments that stay above
/// roundoff.
struct Coherence {
  bool ok = true;
  std::string message;
};

inline Coherence coherence(const Sequence& s, analysis::Decision d,
                           const std::vector<long long>& checkpoints = default_checkpoints(), const Config& cfg = {}) {
  const auto sums = partial_sums(s, checkpoints, cfg);
  std::vector<long double> inc;
  for (std::size_t k = 0; k + 1 < sums.size(); ++k) inc.push_back(sums[k + 1].value - sums[k].value);
  Coherence c;
  if (d == analysis::Decision::Converges) {
    for (std::size_t k = 0; k + 1 < inc.size(); ++k)
      if (inc[k + 1] >= inc[k]) {
        c.ok = false;
        c.message = "partial-sum increments grow although the verdict is converges";
      }
  } else if (d == analysis::Decision::Diverges) {
    if (inc.back() <= 10 * (sums.back().estimated_roundoff + sums[sums.size() - 2].estimated_roundoff)) {
      c.ok = false;
      c.message = "partial sums stabilize below roundoff although the verdict is diverges";
    }
  }
  return c;
}

/// (N, S(N)) as CSV; for tails N is the first index.
inline void write_csv(std::ostream& os, const std::vector<SumResult>& sums) {
  os << "N,S\n";
  os.precision(std::numeric_limits<long double>::max_digits10);
  for (const auto& r : sums) os << (r.tail ? r.first : r.last) << ',' << r.value << '\n';
}

}  // namespace serieslab::oracle
