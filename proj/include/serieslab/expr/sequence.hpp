#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "serieslab/expr/compiled.hpp"
#include "serieslab/expr/parser.hpp"
#include "serieslab/expr/positivity.hpp"

namespace serieslab::expr {

/// A positive sequence a_n, n >= n0. Either a parsed formula with bound
/// parameters, or a pair of callables (ln a_n at any n; a_n at desk scale)
/// for terms outside the grammar such as (2 + (-1)^n)/n^3.
class Sequence {
 public:
  using LnFn = std::function<ExtScalar(const ExtScalar&)>;
  using FastFn = std::function<long double(long long)>;

  static Sequence from_text(const std::string& text, const Bindings& b = {},
                            std::optional<long long> n0 = std::nullopt) {
    return from_expr(parse(text), b, n0, text);
  }

  static Sequence from_expr(const Expr& e, const Bindings& b = {}, std::optional<long long> n0 = std::nullopt,
                            std::string text = {}) {
    for (const auto& name : params(e))
      if (!b.count(name)) throw UnboundParameter(name);
    Sequence s;
    s.text_ = text.empty() ? print(e) : std::move(text);
    s.expr_ = e;
    s.bindings_ = b;
    s.n0_ = n0 ? *n0 : infer_n0(e, b);
    s.linear_ = log_linear(e);
    s.form_ = to_log_power(e, b);
    s.fast_ = CompiledExpr(e, b);
    return s;
  }

  static Sequence from_callables(std::string name, LnFn ln_term, FastFn term, long long n0) {
    Sequence s;
    s.text_ = std::move(name);
    s.ln_fn_ = std::move(ln_term);
    s.fast_fn_ = std::move(term);
    s.n0_ = n0;
    return s;
  }

  const std::string& text() const { return text_; }
  const Expr& expr() const { return expr_; }
  const Bindings& bindings() const { return bindings_; }
  long long n0() const { return n0_; }
  const std::optional<LogPowerForm>& log_power() const { return form_; }
  const std::optional<LogLinear>& log_linear_form() const { return linear_; }
  bool is_formula() const { return expr_ != nullptr; }

  /// Replaces a_n for n <= 100. Limits never look there; sums do.
  void set_prefix(long long n, long double value) {
    if (n > 100) throw InvalidArgument("prefix overrides are limited to n <= 100");
    if (!(value > 0)) throw InvalidArgument("prefix override must be positive");
    prefix_[n] = value;
  }

  ExtScalar ln_term(const ExtScalar& n) const {
    if (ln_fn_) return ln_fn_(n);
    return bound(n.precision_config()).eval(n, bindings_);
  }

  ExtScalar term(const ExtScalar& n) const {
    if (ln_fn_) return numeric::ext_exp(ln_fn_(n));
    return eval(expr_, n, bindings_);
  }

  /// a_n in long double for summation.
  long double term_ld(long long n) const {
    if (!prefix_.empty()) {
      const auto it = prefix_.find(n);
      if (it != prefix_.end()) return it->second;
    }
    if (fast_fn_) return fast_fn_(n);
    return fast_(static_cast<long double>(n));
  }

  /// a(x) for real x; only formulas have one.
  bool has_continuous_term() const { return expr_ != nullptr; }
  long double term_at(long double x) const { return fast_(x); }

  const BoundLogLinear& bound(const Precision& p = {}) const {
    if (!bound_ || bound_bits_ != p.significand_bits) {
      bound_ = bind(*linear_, bindings_, p);
      bound_bits_ = p.significand_bits;
    }
    return *bound_;
  }

  /// c * a_n for a positive constant c.
  Sequence scaled(const Rational& c) const {
    if (c <= 0) throw InvalidArgument("scale must be positive");
    if (expr_) {
      Sequence s = from_expr(build::mul(build::constant(c), expr_), bindings_, n0_);
      s.prefix_ = prefix_;
      return s;
    }
    const long double cl = to_real(c, 64).to_long_double();
    const ExtScalar lc = numeric::ext_ln(to_ext(c, {}));
    Sequence s = from_callables(
        text_ + " scaled", [f = ln_fn_, lc](const ExtScalar& n) { return f(n) + lc; },
        [g = fast_fn_, cl](long long n) { return cl * g(n); }, n0_);
    return s;
  }

 private:
  std::string text_;
  Expr expr_;
  Bindings bindings_;
  long long n0_ = 1;
  std::optional<LogLinear> linear_;
  std::optional<LogPowerForm> form_;
  CompiledExpr fast_;
  LnFn ln_fn_;
  FastFn fast_fn_;
  std::map<long long, long double> prefix_;
  mutable std::optional<BoundLogLinear> bound_;
  mutable unsigned bound_bits_ = 0;
};

}  // namespace serieslab::expr
