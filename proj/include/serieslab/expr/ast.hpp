#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "serieslab/expr/rational.hpp"

namespace serieslab::expr {

enum class Kind { Const, Param, Var, Add, Sub, Mul, Div, Neg, Pow, Ln, IterLn, Exp };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  Rational value;       // Const
  std::string name;     // Param
  int k = 0;            // IterLn depth
  std::vector<Expr> args;
  std::size_t offset = 0;  // source position, ignored by equality
};

using Bindings = std::map<std::string, Rational>;

namespace build {

inline Expr make(Kind kind, std::vector<Expr> args, std::size_t offset = 0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->offset = offset;
  return n;
}

inline Expr constant(const Rational& v, std::size_t offset = 0) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = v;
  n->offset = offset;
  return n;
}

inline Expr param(const std::string& name, std::size_t offset = 0) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Param;
  n->name = name;
  n->offset = offset;
  return n;
}

inline Expr var(std::size_t offset = 0) { return make(Kind::Var, {}, offset); }

inline Expr iter_ln(int k, Expr x, std::size_t offset = 0) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::IterLn;
  n->k = k;
  n->args = {std::move(x)};
  n->offset = offset;
  return n;
}

inline Expr ln(Expr x) { return make(Kind::Ln, {std::move(x)}); }
inline Expr exp(Expr x) { return make(Kind::Exp, {std::move(x)}); }
inline Expr neg(Expr x) { return make(Kind::Neg, {std::move(x)}); }
inline Expr add(Expr a, Expr b) { return make(Kind::Add, {std::move(a), std::move(b)}); }
inline Expr sub(Expr a, Expr b) { return make(Kind::Sub, {std::move(a), std::move(b)}); }
inline Expr mul(Expr a, Expr b) { return make(Kind::Mul, {std::move(a), std::move(b)}); }
inline Expr div(Expr a, Expr b) { return make(Kind::Div, {std::move(a), std::move(b)}); }
inline Expr pow(Expr a, Expr b) { return make(Kind::Pow, {std::move(a), std::move(b)}); }

}  // namespace build

inline bool is_const(const Expr& e, const Rational& v) { return e->kind == Kind::Const && e->value == v; }

inline bool depends_on_n(const Expr& e) {
  if (e->kind == Kind::Var) return true;
  for (const auto& a : e->args)
    if (depends_on_n(a)) return true;
  return false;
}

inline void collect_params(const Expr& e, std::set<std::string>& out) {
  if (e->kind == Kind::Param) out.insert(e->name);
  for (const auto& a : e->args) collect_params(a, out);
}

inline std::set<std::string> params(const Expr& e) {
  std::set<std::string> out;
  collect_params(e, out);
  return out;
}

/// Deepest iterated-log depth applied anywhere in e (ln counts as 1).
inline int max_log_depth(const Expr& e) {
  int d = 0;
  for (const auto& a : e->args) d = std::max(d, max_log_depth(a));
  if (e->kind == Kind::Ln) d = std::max(d, 1 + max_log_depth(e->args[0]));
  if (e->kind == Kind::IterLn) d = std::max(d, e->k + max_log_depth(e->args[0]));
  return d;
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case Kind::Const: if (a->value != b->value) return false; break;
    case Kind::Param: if (a->name != b->name) return false; break;
    case Kind::IterLn: if (a->k != b->k) return false; break;
    default: break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  return true;
}

// --- printing -------------------------------------------------------------------

namespace detail {

inline int precedence(const Expr& e) {
  switch (e->kind) {
    case Kind::Add: case Kind::Sub: return 1;
    case Kind::Mul: case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    case Kind::Const:
      return (e->value < 0 || to_string(e->value).find('/') != std::string::npos) ? 0 : 5;
    default: return 5;
  }
}

inline std::string fn_name(const Expr& e) {
  if (e->kind == Kind::Ln) return "ln";
  if (e->kind == Kind::Exp) return "exp";
  if (e->k >= 2 && e->k <= 4) {
    std::string s;
    for (int i = 0; i < e->k; ++i) s += "ln";
    return s;
  }
  return "log_" + std::to_string(e->k);
}

}  // namespace detail

inline std::string print(const Expr& e) {
  using detail::precedence;
  auto wrap = [](const Expr& x, int min_prec) {
    const std::string s = print(x);
    return precedence(x) < min_prec ? "(" + s + ")" : s;
  };
  switch (e->kind) {
    case Kind::Const: return to_string(e->value);
    case Kind::Param: return e->name;
    case Kind::Var: return "n";
    case Kind::Add: return wrap(e->args[0], 1) + " + " + wrap(e->args[1], 2);
    case Kind::Sub: return wrap(e->args[0], 1) + " - " + wrap(e->args[1], 2);
    case Kind::Mul: return wrap(e->args[0], 2) + "*" + wrap(e->args[1], 3);
    case Kind::Div: return wrap(e->args[0], 2) + "/" + wrap(e->args[1], 3);
    case Kind::Neg: return "-" + wrap(e->args[0], 3);
    case Kind::Pow: {
      const Expr& x = e->args[1];
      std::string ex;
      if (x->kind == Kind::Neg && precedence(x->args[0]) == 5) {
        ex = "-" + print(x->args[0]);
      } else {
        ex = wrap(x, 5);
      }
      return wrap(e->args[0], 5) + "^" + ex;
    }
    case Kind::Ln: case Kind::IterLn: case Kind::Exp:
      return detail::fn_name(e) + "(" + print(e->args[0]) + ")";
  }
  return "?";
}

}  // namespace serieslab::expr
