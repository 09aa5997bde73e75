#pragma once

// Recursive-descent parser for the term DSL:
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := atom ('^' ['-'] atom)?
//   atom   := number | name | 'n' | '(' expr ')' | fn '(' expr ')'
//   fn     := ln | lnln | lnlnln | lnlnlnln | log_<digit> | exp
//
// Exponents may not depend on n.

#include <cctype>
#include <string>
#include <string_view>

#include "serieslab/expr/ast.hpp"

namespace serieslab::expr {

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr run() {
    skip();
    if (pos_ == s_.size()) throw SyntaxError(pos_, "empty expression");
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) throw SyntaxError(pos_, std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = build::make(Kind::Add, {lhs, term()}, at);
      } else if (accept('-')) {
        lhs = build::make(Kind::Sub, {lhs, term()}, at);
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      skip();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = build::make(Kind::Mul, {lhs, unary()}, at);
      } else if (accept('/')) {
        lhs = build::make(Kind::Div, {lhs, unary()}, at);
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    skip();
    const std::size_t at = pos_;
    if (accept('-')) return build::make(Kind::Neg, {unary()}, at);
    return factor();
  }

  Expr factor() {
    Expr base = atom();
    skip();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    skip();
    const std::size_t ex_at = pos_;
    Expr ex = accept('-') ? build::make(Kind::Neg, {atom()}, ex_at) : atom();
    if (depends_on_n(ex)) throw SyntaxError(ex_at, "exponent must not depend on n");
    return build::make(Kind::Pow, {base, ex}, at);
  }

  Expr atom() {
    skip();
    const std::size_t at = pos_;
    if (pos_ == s_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
      const std::string name(s_.substr(pos_, end - pos_));
      pos_ = end;
      int depth = 0;
      bool is_exp = false;
      if (name == "exp") {
        is_exp = true;
      } else if (name.size() >= 2 && name.size() % 2 == 0 && name.size() <= 8 &&
                 name.find_first_not_of("ln") == std::string::npos) {
        bool ok = true;
        for (std::size_t i = 0; i < name.size(); i += 2) ok = ok && name.compare(i, 2, "ln") == 0;
        if (ok) depth = static_cast<int>(name.size() / 2);
      } else if (name.size() == 5 && name.compare(0, 4, "log_") == 0 && name[4] >= '1' && name[4] <= '9') {
        depth = name[4] - '0';
      } else if (name.compare(0, 4, "log_") == 0 || name == "log") {
        throw ArityError(at, "'" + name + "' is not a known function (use log_1 .. log_9)");
      }
      if (depth == 0 && !is_exp) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(') throw ArityError(at, "'" + name + "' is not a function");
        return name == "n" ? build::var(at) : build::param(name, at);
      }
      skip();
      if (!accept('(')) throw ArityError(pos_, "'" + name + "' needs one parenthesized argument");
      skip();
      if (pos_ < s_.size() && s_[pos_] == ')') throw ArityError(pos_, "'" + name + "' called with no argument");
      Expr arg = expr();
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') throw ArityError(pos_, "'" + name + "' takes one argument");
      if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
      if (is_exp) return build::make(Kind::Exp, {arg}, at);
      // "ln" is kept distinct from log_1 so printing round-trips.
      if (name == "ln") return build::make(Kind::Ln, {arg}, at);
      return build::iter_ln(depth, arg, at);
    }
    throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.')) ++end;
    if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
      std::size_t j = end + 1;
      if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
      if (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
        end = j;
        while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
      }
    }
    pos_ = end;
    try {
      return build::constant(parse_decimal(s_.substr(at, end - at)), at);
    } catch (const InvalidArgument&) {
      throw SyntaxError(at, "malformed number");
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).run(); }

}  // namespace serieslab::expr
