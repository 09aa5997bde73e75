#pragma once

// Test statistics as ratios of log-linear forms, with an exact limit rule
// for forms whose coefficients are rational and a sampled path otherwise.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "serieslab/limits/limits.hpp"
#include "serieslab/scale/scale.hpp"

namespace serieslab::analysis {

using expr::Bindings;
using expr::LogLinear;
using expr::Rational;
using expr::Sequence;
using limits::GridSchedule;
using limits::LimitEstimate;
using limits::Sample;
using limits::Status;
using numeric::ExtScalar;
using numeric::Precision;
using numeric::Real;
using scale::ScaleFn;

/// Exact limit of a statistic: a rational, an exp-of-constant, or +-inf.
struct ExactLimit {
  int infinite = 0;             // +1 / -1 for +-inf
  std::optional<Rational> q;    // rational value
  std::optional<ExtScalar> x;   // non-rational finite value (exp of a constant)

  static ExactLimit inf(int s) { return {s, std::nullopt, std::nullopt}; }
  static ExactLimit rational(const Rational& r) { return {0, r, std::nullopt}; }

  LimitEstimate estimate(const Precision& p = {}) const {
    if (infinite) return LimitEstimate::infinite(infinite);
    return LimitEstimate::exact(q ? expr::to_ext(*q, p) : *x);
  }
};

/// ln of a product of positive factors: an exact log-linear part plus
/// pieces evaluated directly (callable terms, custom increments) and the
/// vanishing corrections of catalog ln(delta w).
class LogExpr {
 public:
  using Fn = std::function<ExtScalar(const ExtScalar&)>;

  LogExpr() = default;
  explicit LogExpr(Bindings b) : bindings_(std::move(b)) {}

  LogExpr& add(const LogLinear& L, int sign = 1) {
    linear_ += sign > 0 ? L : L.negated();
    has_linear_ = true;
    bound_.clear();
    return *this;
  }

  LogExpr& add_fn(Fn f, int sign = 1) {
    fns_.push_back({std::move(f), sign});
    return *this;
  }

  LogExpr& add_sequence(const Sequence& s, int sign = 1) {
    if (s.is_formula()) return add(*s.log_linear_form(), sign);
    return add_fn([s](const ExtScalar& n) { return s.ln_term(n); }, sign);
  }

  /// ln delta w(n) with the given sign.
  LogExpr& add_log_delta(const ScaleFn& w, int sign = 1) {
    if (!w.is_catalog()) return add_fn([w](const ExtScalar& n) { return w.log_delta(n); }, sign);
    add(w.log_delta_main(), sign);
    corrections_.push_back({w, sign});
    return *this;
  }

  bool symbolic() const {
    if (!fns_.empty() || !has_linear_) return fns_.empty();
    if (linear_.opaque || !linear_.other.empty()) return false;
    const auto& B = bound({});
    return B.all_exact;
  }

  /// Deepest iterated log present in the exact part.
  int depth() const { return linear_.depth.empty() ? 0 : linear_.depth.rbegin()->first; }

  const LogLinear& linear() const { return linear_; }
  bool has_direct_pieces() const { return !fns_.empty(); }

  ExtScalar value(const ExtScalar& n) const {
    const Precision p = n.precision_config();
    ExtScalar s(p);
    if (has_linear_) s = bound(p).eval(n, bindings_);
    for (const auto& [f, sign] : fns_) s = sign > 0 ? s + f(n) : s - f(n);
    for (const auto& [w, sign] : corrections_) {
      const ExtScalar c = w.log_delta_correction(n);
      s = sign > 0 ? s + c : s - c;
    }
    return s;
  }

  /// value(n+1) - value(n). Iterated-log terms use cancellation-free
  /// increments; everything else is differenced at doubled precision.
  ExtScalar increment(const ExtScalar& n) const {
    const Precision p = n.precision_config();
    const Precision p2{2 * p.significand_bits, p.max_tower_level};
    const ExtScalar n2 = n.with_precision(p2);
    const ExtScalar n2p = n2 + ExtScalar(1L, p2);
    ExtScalar s(p);
    if (has_linear_) {
      const auto& B = bound(p);
      for (const auto& [d, c] : B.depth) {
        const ExtScalar step = d == 0 ? ExtScalar(1L, p) : ScaleFn::iter_log(d).delta(n);
        s = s + c * step;
      }
      for (const auto& [c, t] : B.other) {
        const ExtScalar diff = expr::eval(t, n2p, bindings_) - expr::eval(t, n2, bindings_);
        s = s + c * diff.with_precision(p);
      }
    }
    auto direct = [&](const Fn& f) { return (f(n2p) - f(n2)).with_precision(p); };
    for (const auto& [f, sign] : fns_) s = sign > 0 ? s + direct(f) : s - direct(f);
    for (const auto& [w, sign] : corrections_) {
      if (!n.is_plain()) continue;  // both corrections round to zero
      const ExtScalar c = direct([&w](const ExtScalar& x) { return w.log_delta_correction(x); });
      s = sign > 0 ? s + c : s - c;
    }
    return s;
  }

  /// increment(n) / (ln_(ref)(n+1) - ln_(ref) n). Past the plain range the
  /// increments themselves underflow into reciprocal towers, which cannot
  /// carry a coefficient, so the ratios come from derivatives:
  /// d ln_(d) n / d ln_(ref) n = prod of ln_(k) n between the two depths.
  /// Direct pieces difference to zero there and are dropped.
  ExtScalar increment_relative(const ExtScalar& n, int ref) const {
    if (n.is_plain()) {
      const ExtScalar inc = increment(n);
      return ref == 0 ? inc : inc / ScaleFn::iter_log(ref).delta(n);
    }
    const Precision p = n.precision_config();
    ExtScalar s(p);
    if (!has_linear_) return s;
    for (const auto& [d, c] : bound(p).depth) {
      ExtScalar r(1L, p);
      for (int k = std::min(d, ref); k < std::max(d, ref); ++k) r = r * numeric::iter_ln(static_cast<unsigned>(k), n);
      s = s + (d <= ref ? c * r : c / r);
    }
    return s;
  }

  /// Rational depth coefficients of the exact part.
  std::map<int, Rational> exact_terms() const { return bound({}).exact; }
  ExtScalar constant(const Precision& p = {}) const { return bound(p).constant; }

 private:
  const expr::BoundLogLinear& bound(const Precision& p) const {
    auto it = bound_.find(p.significand_bits);
    if (it == bound_.end()) it = bound_.emplace(p.significand_bits, expr::bind(linear_, bindings_, p)).first;
    return it->second;
  }

  Bindings bindings_;
  LogLinear linear_;
  bool has_linear_ = false;
  std::vector<std::pair<Fn, int>> fns_;
  std::vector<std::pair<ScaleFn, int>> corrections_;
  mutable std::map<unsigned, expr::BoundLogLinear> bound_;
};

namespace detail {

inline std::optional<std::pair<int, Rational>> leading(const std::map<int, Rational>& t) {
  for (const auto& [d, c] : t)
    if (c != 0) return std::make_pair(d, c);
  return std::nullopt;
}

}  // namespace detail

/// lim N(n)/D(n) for exact forms. ln_(d) n outgrows every ln_(d') n with
/// d' > d, and so do their increments, so the same rule covers ratios of
/// first differences.
inline ExactLimit exact_ratio_limit(const std::map<int, Rational>& numer, const std::map<int, Rational>& denom) {
  const auto dl = detail::leading(denom);
  if (!dl) throw InvalidArgument("denominator of a statistic does not grow");
  const auto nl = detail::leading(numer);
  if (!nl || nl->first > dl->first) return ExactLimit::rational(0);
  if (nl->first < dl->first) return ExactLimit::inf((nl->second > 0) == (dl->second > 0) ? 1 : -1);
  return ExactLimit::rational(nl->second / dl->second);
}

/// lim exp(N(n)) for an exact form N.
inline ExactLimit exact_exp_limit(const std::map<int, Rational>& numer, const ExtScalar& constant) {
  const auto nl = detail::leading(numer);
  if (!nl) return {0, std::nullopt, numeric::ext_exp(constant)};
  if (nl->second > 0) return ExactLimit::inf(1);
  return ExactLimit::rational(0);
}

class Statistic {
 public:
  enum class Shape {
    Quotient,    // N(n) / D(n)
    Difference,  // (N(n+1) - N(n)) / (D(n+1) - D(n))
    Raabe,       // n (exp(N(n+1) - N(n)) - 1)
    Exp          // exp(N(n))
  };

  Statistic(Shape shape, LogExpr numer, LogExpr denom = {})
      : shape_(shape), numer_(std::move(numer)), denom_(std::move(denom)) {}

  Shape shape() const { return shape_; }
  const LogExpr& numer() const { return numer_; }
  const LogExpr& denom() const { return denom_; }

  bool symbolic() const { return numer_.symbolic() && denom_.symbolic(); }
  int depth() const { return std::max(numer_.depth(), denom_.depth()); }

  ExtScalar at(const ExtScalar& n) const {
    switch (shape_) {
      case Shape::Quotient: return numer_.value(n) / denom_.value(n);
      case Shape::Difference: {
        const int ref = denom_.depth();
        return numer_.increment_relative(n, ref) / denom_.increment_relative(n, ref);
      }
      case Shape::Raabe:
        if (!n.is_plain()) return numer_.increment_relative(n, 1);  // n expm1(x) ~ n x
        return n * numeric::ext_expm1(numer_.increment(n));
      case Shape::Exp: return numeric::ext_exp(numer_.value(n));
    }
    return ExtScalar();
  }

  ExactLimit exact_limit() const {
    switch (shape_) {
      case Shape::Quotient:
      case Shape::Difference: return exact_ratio_limit(numer_.exact_terms(), denom_.exact_terms());
      case Shape::Raabe: return exact_ratio_limit(numer_.exact_terms(), {{1, Rational(1)}});
      case Shape::Exp: return exact_exp_limit(numer_.exact_terms(), numer_.constant());
    }
    return ExactLimit::rational(0);
  }

 private:
  Shape shape_;
  LogExpr numer_;
  LogExpr denom_;
};

/// First grid point never sits in the overridable prefix or below n0.
inline long long grid_floor(long long n0) { return std::max<long long>(n0, 101); }

/// Tower grids make the deepest log of the statistic move by one unit per
/// step; shallow or non-exact statistics use plain geometric grids.
inline GridSchedule default_grid(const Statistic& s, long long n0, const Precision& p = {}) {
  const int D = s.depth();
  const long long floor_n = grid_floor(n0);
  const bool towers_ok = s.symbolic() && D >= 2;
  if (!towers_ok) {
    const long double start = std::max<long double>(1000.0L, static_cast<long double>(floor_n));
    return GridSchedule::geometric(start, 10, 12);
  }
  const double lnD = numeric::iter_ln(static_cast<unsigned>(D), ExtScalar(static_cast<long>(floor_n), p)).to_double();
  const long double r0 = std::max(1.5L, static_cast<long double>(lnD) + 0.5L);
  const unsigned level = static_cast<unsigned>(D);
  // exp^level(r) with r >= e climbs one level; keep the top level in range.
  if (level + 1 > p.max_tower_level) {
    const long double top = 2.7L;
    return GridSchedule::tower(level, r0, (top - r0) / 12, 12);
  }
  return GridSchedule::tower(level, r0, 1, 12);
}

struct SampleRun {
  std::vector<Sample> samples;
  bool absorbed = false;
  std::string grid;
};

inline SampleRun sample(const Statistic& s, const std::vector<ExtScalar>& grid) {
  SampleRun run;
  for (const auto& n : grid) {
    const ExtScalar v = s.at(n);
    run.absorbed = run.absorbed || v.absorbed();
    run.samples.push_back({n, v});
  }
  return run;
}

/// Samples at n and n + 1 for every plain grid point, so that parity
/// oscillations show up in limsup/liminf windows.
inline SampleRun sample_pairs(const Statistic& s, const std::vector<ExtScalar>& grid) {
  SampleRun run;
  for (const auto& n : grid) {
    run.samples.push_back({n, s.at(n)});
    if (n.is_plain()) {
      const ExtScalar n1 = n + ExtScalar(1L, n.precision_config());
      run.samples.push_back({n1, s.at(n1)});
    }
  }
  return run;
}

}  // namespace serieslab::analysis
