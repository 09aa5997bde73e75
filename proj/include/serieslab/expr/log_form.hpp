#pragma once

// ln a_n as a linear combination of iterated logs of n.
//
//   ln a_n = constant + sum_d coef_d * ln_(d) n + sum_j coef_j * other_j(n)
//
// with ln_(0) n = n. Coefficients are n-free expressions so parameters stay
// symbolic until binding. Keeping the depth terms separate lets statistics
// cancel the huge parts exactly before anything is evaluated.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "serieslab/expr/eval.hpp"

namespace serieslab::expr {

namespace simplify {

inline Expr add(const Expr& a, const Expr& b) {
  if (!a) return b;
  if (!b) return a;
  if (a->kind == Kind::Const && b->kind == Kind::Const) return build::constant(a->value + b->value);
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  return build::add(a, b);
}

inline Expr neg(const Expr& a) {
  if (a->kind == Kind::Const) return build::constant(-a->value);
  if (a->kind == Kind::Neg) return a->args[0];
  return build::neg(a);
}

inline Expr mul(const Expr& a, const Expr& b) {
  if (a->kind == Kind::Const && b->kind == Kind::Const) return build::constant(a->value * b->value);
  if (is_const(a, 0) || is_const(b, 0)) return build::constant(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (is_const(a, -1)) return neg(b);
  if (is_const(b, -1)) return neg(a);
  return build::mul(a, b);
}

}  // namespace simplify

inline Expr log_term(int depth) {
  if (depth == 0) return build::var();
  if (depth == 1) return build::ln(build::var());
  return build::iter_ln(depth, build::var());
}

struct LogLinear {
  Expr constant;                               // n-free, may be null
  std::map<int, Expr> depth;                   // coefficient of ln_(d) n
  std::vector<std::pair<Expr, Expr>> other;    // (coefficient, n-dependent term)
  bool opaque = false;                         // an undecomposable sum was logged

  LogLinear& operator+=(const LogLinear& o) {
    constant = simplify::add(constant, o.constant);
    for (const auto& [d, c] : o.depth) {
      auto it = depth.find(d);
      depth[d] = it == depth.end() ? c : simplify::add(it->second, c);
    }
    other.insert(other.end(), o.other.begin(), o.other.end());
    opaque = opaque || o.opaque;
    prune();
    return *this;
  }

  LogLinear scaled(const Expr& c) const {
    LogLinear r;
    r.opaque = opaque;
    if (constant) r.constant = simplify::mul(c, constant);
    for (const auto& [d, k] : depth) r.depth[d] = simplify::mul(c, k);
    for (const auto& [k, t] : other) r.other.emplace_back(simplify::mul(c, k), t);
    r.prune();
    return r;
  }

  LogLinear negated() const { return scaled(build::constant(-1)); }

  bool only_depth(int d) const {
    return !constant && other.empty() && depth.size() == 1 && depth.begin()->first == d;
  }

  void prune() {
    if (constant && is_const(constant, 0)) constant = nullptr;
    for (auto it = depth.begin(); it != depth.end();) {
      it = is_const(it->second, 0) ? depth.erase(it) : std::next(it);
    }
  }

  Expr to_expr() const {
    Expr out;
    auto append = [&out](const Expr& coef, const Expr& term) {
      Expr piece;
      bool minus = false;
      if (coef->kind == Kind::Const && coef->value < 0) {
        minus = true;
        piece = simplify::mul(build::constant(-coef->value), term);
      } else if (coef->kind == Kind::Neg) {
        minus = true;
        piece = simplify::mul(coef->args[0], term);
      } else {
        piece = simplify::mul(coef, term);
      }
      if (!out) {
        out = minus ? build::neg(piece) : piece;
      } else {
        out = minus ? build::sub(out, piece) : build::add(out, piece);
      }
    };
    if (constant) append(constant, build::constant(1));
    for (const auto& [d, c] : depth) append(c, log_term(d));
    for (const auto& [c, t] : other) append(c, t);
    return out ? out : build::constant(0);
  }
};

namespace detail {

LogLinear log_linear(const Expr& e);
LogLinear linearize(const Expr& u);

inline LogLinear constant_term(const Expr& e) {
  LogLinear r;
  r.constant = e;
  r.prune();
  return r;
}

inline LogLinear other_term(const Expr& e) {
  LogLinear r;
  r.other.emplace_back(build::constant(1), e);
  return r;
}

// ln of the quantity whose value is L.
inline LogLinear log_of(const LogLinear& L) {
  if (!L.constant && L.other.empty() && L.depth.size() == 1) {
    const auto& [d, c] = *L.depth.begin();
    LogLinear r;
    r.depth[d + 1] = build::constant(1);
    if (!is_const(c, 1)) r.constant = build::ln(c);
    return r;
  }
  if (!L.constant && L.depth.empty() && L.other.size() == 1) {
    const auto& [c, t] = L.other.front();
    LogLinear r = log_linear(t);
    if (!is_const(c, 1)) r += constant_term(build::ln(c));
    return r;
  }
  LogLinear r = other_term(build::ln(L.to_expr()));
  r.opaque = L.opaque;
  return r;
}

inline LogLinear iterated_log_of(int k, const Expr& x) {
  if (k == 0) return linearize(x);
  LogLinear L = log_linear(x);
  for (int i = 1; i < k; ++i) L = log_of(L);
  return L;
}

// The value of u itself, as a linear form.
inline LogLinear linearize(const Expr& u) {
  if (!depends_on_n(u)) return constant_term(u);
  switch (u->kind) {
    case Kind::Var: {
      LogLinear r;
      r.depth[0] = build::constant(1);
      return r;
    }
    case Kind::Ln: return log_linear(u->args[0]);
    case Kind::IterLn: return iterated_log_of(u->k, u->args[0]);
    case Kind::Add: {
      LogLinear r = linearize(u->args[0]);
      r += linearize(u->args[1]);
      return r;
    }
    case Kind::Sub: {
      LogLinear r = linearize(u->args[0]);
      r += linearize(u->args[1]).negated();
      return r;
    }
    case Kind::Neg: return linearize(u->args[0]).negated();
    case Kind::Mul:
      if (!depends_on_n(u->args[0])) return linearize(u->args[1]).scaled(u->args[0]);
      if (!depends_on_n(u->args[1])) return linearize(u->args[0]).scaled(u->args[1]);
      return other_term(u);
    case Kind::Div:
      if (!depends_on_n(u->args[1]))
        return linearize(u->args[0]).scaled(build::div(build::constant(1), u->args[1]));
      return other_term(u);
    default: return other_term(u);
  }
}

inline LogLinear log_linear(const Expr& e) {
  if (!depends_on_n(e)) {
    if (is_const(e, 1)) return {};
    return constant_term(build::ln(e));
  }
  switch (e->kind) {
    case Kind::Var: {
      LogLinear r;
      r.depth[1] = build::constant(1);
      return r;
    }
    case Kind::Mul: {
      LogLinear r = log_linear(e->args[0]);
      r += log_linear(e->args[1]);
      return r;
    }
    case Kind::Div: {
      LogLinear r = log_linear(e->args[0]);
      r += log_linear(e->args[1]).negated();
      return r;
    }
    case Kind::Pow: return log_linear(e->args[0]).scaled(e->args[1]);
    case Kind::Exp: return linearize(e->args[0]);
    case Kind::Ln: return log_of(log_linear(e->args[0]));
    case Kind::IterLn: return log_of(iterated_log_of(e->k, e->args[0]));
    default: {
      LogLinear r = other_term(build::ln(e));
      r.opaque = true;
      return r;
    }
  }
}

}  // namespace detail

/// ln e as a linear form in iterated logs of n.
inline LogLinear log_linear(const Expr& e) { return detail::log_linear(e); }

/// Expression L with L(n) = ln e(n).
inline Expr log_transform(const Expr& e) { return log_linear(e).to_expr(); }

/// A log-linear form with parameters bound to numbers.
struct BoundLogLinear {
  ExtScalar constant;                                 // plain value
  std::map<int, ExtScalar> depth;                     // nonzero coefficients
  std::map<int, Rational> exact;                      // same, when all are rational
  bool all_exact = true;
  std::vector<std::pair<ExtScalar, Expr>> other;
  bool opaque = false;

  ExtScalar eval(const ExtScalar& n, const Bindings& b) const {
    ExtScalar s = constant.with_precision(n.precision_config());
    for (const auto& [d, c] : depth) s = s + c * numeric::iter_ln(static_cast<unsigned>(d), n);
    for (const auto& [c, t] : other) s = s + c * expr::eval(t, n, b);
    return s;
  }
};

inline BoundLogLinear bind(const LogLinear& L, const Bindings& b, const Precision& p = {}) {
  BoundLogLinear r;
  r.opaque = L.opaque;
  r.constant = L.constant ? eval_const(L.constant, b, p) : ExtScalar(p);
  for (const auto& [d, c] : L.depth) {
    const auto q = eval_rational(c, b);
    if (q) {
      if (*q == 0) continue;
      r.exact[d] = *q;
      r.depth[d] = to_ext(*q, p);
    } else {
      r.all_exact = false;
      ExtScalar v = eval_const(c, b, p);
      if (!v.is_zero()) r.depth[d] = v;
    }
  }
  for (const auto& [c, t] : L.other) r.other.emplace_back(eval_const(c, b, p), t);
  return r;
}

/// a_n = c * prod_{i=0}^{m} (ln_(i) n)^{p_i}
struct LogPowerForm {
  ExtScalar log_c;              // ln c
  std::vector<Rational> p;      // trailing zeros trimmed

  ExtScalar c() const { return numeric::ext_exp(log_c); }

  Expr to_expr() const {
    Expr out;
    auto times = [&out](const Expr& x) { out = out ? build::mul(out, x) : x; };
    if (!log_c.is_zero()) {
      const std::string txt = log_c.to_real().to_string(70);
      times(build::exp(build::constant(parse_decimal(txt))));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0) continue;
      Expr base = log_term(static_cast<int>(i));
      times(p[i] == 1 ? base : build::pow(base, build::constant(p[i])));
    }
    return out ? out : build::constant(1);
  }
};

/// The exact log-power normal form, or nullopt when e is not in the class.
inline std::optional<LogPowerForm> to_log_power(const Expr& e, const Bindings& b = {},
                                                const Precision& prec = {}) {
  const LogLinear L = log_linear(e);
  if (L.opaque || !L.other.empty()) return std::nullopt;
  BoundLogLinear B;
  try {
    B = bind(L, b, prec);
  } catch (const DomainError&) {
    return std::nullopt;  // ln of a non-positive constant
  }
  if (!B.all_exact || B.exact.count(0)) return std::nullopt;
  LogPowerForm f;
  f.log_c = B.constant;
  if (!B.exact.empty()) {
    const int m = B.exact.rbegin()->first - 1;
    if (m > static_cast<int>(prec.max_tower_level) - 2) return std::nullopt;
    f.p.assign(static_cast<std::size_t>(m + 1), Rational(0));
    for (const auto& [d, q] : B.exact) f.p[static_cast<std::size_t>(d - 1)] = q;
  }
  return f;
}

}  // namespace serieslab::expr
