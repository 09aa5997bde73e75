#pragma once

#include <optional>

#include "serieslab/expr/ast.hpp"
#include "serieslab/numeric/ext_scalar.hpp"

namespace serieslab::expr {

using numeric::ExtScalar;
using numeric::Precision;

inline ExtScalar to_ext(const Rational& r, const Precision& p) {
  return ExtScalar::from_real(to_real(r, static_cast<mpfr_prec_t>(p.significand_bits)), p.max_tower_level);
}

namespace detail {

inline ExtScalar eval_impl(const Expr& e, const ExtScalar* n, const Bindings& b, const Precision& p) {
  auto arg = [&](std::size_t i) { return eval_impl(e->args[i], n, b, p); };
  switch (e->kind) {
    case Kind::Const: return to_ext(e->value, p);
    case Kind::Param: {
      const auto it = b.find(e->name);
      if (it == b.end()) throw UnboundParameter(e->name);
      return to_ext(it->second, p);
    }
    case Kind::Var:
      if (n == nullptr) throw InvalidArgument("expression depends on n where a constant is required");
      return *n;
    case Kind::Add: return arg(0) + arg(1);
    case Kind::Sub: return arg(0) - arg(1);
    case Kind::Mul: return arg(0) * arg(1);
    case Kind::Div: return arg(0) / arg(1);
    case Kind::Neg: return -arg(0);
    case Kind::Pow: return numeric::ext_pow(arg(0), arg(1));
    case Kind::Ln: return numeric::ext_ln(arg(0));
    case Kind::IterLn: return numeric::iter_ln(static_cast<unsigned>(e->k), arg(0));
    case Kind::Exp: return numeric::ext_exp(arg(0));
  }
  throw InvalidArgument("bad expression node");
}

}  // namespace detail

/// Value of e at n. Precision follows n.
inline ExtScalar eval(const Expr& e, const ExtScalar& n, const Bindings& b = {}) {
  return detail::eval_impl(e, &n, b, n.precision_config());
}

/// Value of an n-free expression.
inline ExtScalar eval_const(const Expr& e, const Bindings& b, const Precision& p = {}) {
  return detail::eval_impl(e, nullptr, b, p);
}

/// Exact value of an n-free expression built from rationals, parameters,
/// + - * / and integer powers. nullopt when not exactly representable.
inline std::optional<Rational> eval_rational(const Expr& e, const Bindings& b) {
  auto arg = [&](std::size_t i) { return eval_rational(e->args[i], b); };
  switch (e->kind) {
    case Kind::Const: return e->value;
    case Kind::Param: {
      const auto it = b.find(e->name);
      if (it == b.end()) throw UnboundParameter(e->name);
      return it->second;
    }
    case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Div: {
      const auto x = arg(0), y = arg(1);
      if (!x || !y) return std::nullopt;
      if (e->kind == Kind::Add) return *x + *y;
      if (e->kind == Kind::Sub) return *x - *y;
      if (e->kind == Kind::Mul) return *x * *y;
      if (*y == 0) throw DivisionByZero();
      return *x / *y;
    }
    case Kind::Neg: {
      const auto x = arg(0);
      if (!x) return std::nullopt;
      return -*x;
    }
    case Kind::Pow: {
      const auto x = arg(0), y = arg(1);
      if (!x || !y || !is_integer(*y) || abs(*y) > 4096) return std::nullopt;
      const long k = static_cast<long>(boost::multiprecision::numerator(*y));
      if (*x == 0) {
        if (k < 0) throw DivisionByZero();
        return Rational(k == 0 ? 1 : 0);
      }
      Rational r = 1;
      for (long i = 0; i < (k < 0 ? -k : k); ++i) r *= *x;
      return k < 0 ? Rational(1) / r : r;
    }
    default: return std::nullopt;
  }
}

}  // namespace serieslab::expr
