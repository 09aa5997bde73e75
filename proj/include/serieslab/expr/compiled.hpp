#pragma once

// Long-double evaluator for desk-scale n. The tree is flattened once into a
// postfix program; evaluation is a tight loop over a small stack.

#include <cmath>
#include <vector>

#include "serieslab/expr/eval.hpp"

namespace serieslab::expr {

class CompiledExpr {
 public:
  CompiledExpr() = default;

  CompiledExpr(const Expr& e, const Bindings& b) { emit(e, b); }

  long double operator()(long double n) const {
    long double st[64];
    int top = -1;
    for (const Op& op : code_) {
      switch (op.code) {
        case Code::Push: st[++top] = op.value; break;
        case Code::N: st[++top] = n; break;
        case Code::Add: --top; st[top] += st[top + 1]; break;
        case Code::Sub: --top; st[top] -= st[top + 1]; break;
        case Code::Mul: --top; st[top] *= st[top + 1]; break;
        case Code::Div: --top; st[top] /= st[top + 1]; break;
        case Code::Neg: st[top] = -st[top]; break;
        case Code::PowConst: st[top] = std::pow(st[top], op.value); break;
        case Code::Pow: --top; st[top] = std::pow(st[top], st[top + 1]); break;
        case Code::Ln:
          for (int i = 0; i < op.k; ++i) st[top] = std::log(st[top]);
          break;
        case Code::Exp: st[top] = std::exp(st[top]); break;
      }
    }
    return top == 0 ? st[0] : NAN;
  }

  bool empty() const { return code_.empty(); }

 private:
  enum class Code { Push, N, Add, Sub, Mul, Div, Neg, PowConst, Pow, Ln, Exp };
  struct Op {
    Code code;
    long double value = 0;
    int k = 0;
  };

  int emit(const Expr& e, const Bindings& b) {
    // Returns the stack depth the subtree needs.
    if (!depends_on_n(e)) {
      code_.push_back({Code::Push, eval_const(e, b).to_long_double()});
      return 1;
    }
    switch (e->kind) {
      case Kind::Var: code_.push_back({Code::N}); return 1;
      case Kind::Neg: { const int d = emit(e->args[0], b); code_.push_back({Code::Neg}); return d; }
      case Kind::Ln: case Kind::IterLn: {
        const int d = emit(e->args[0], b);
        code_.push_back({Code::Ln, 0, e->kind == Kind::Ln ? 1 : e->k});
        return d;
      }
      case Kind::Exp: { const int d = emit(e->args[0], b); code_.push_back({Code::Exp}); return d; }
      case Kind::Pow:
        if (!depends_on_n(e->args[1])) {
          const int d = emit(e->args[0], b);
          code_.push_back({Code::PowConst, eval_const(e->args[1], b).to_long_double()});
          return d;
        }
        [[fallthrough]];
      default: {
        const int d0 = emit(e->args[0], b);
        const int d1 = emit(e->args[1], b);
        Code c = Code::Add;
        switch (e->kind) {
          case Kind::Add: c = Code::Add; break;
          case Kind::Sub: c = Code::Sub; break;
          case Kind::Mul: c = Code::Mul; break;
          case Kind::Div: c = Code::Div; break;
          default: c = Code::Pow; break;
        }
        code_.push_back({c});
        const int d = std::max(d0, d1 + 1);
        if (d > 60) throw InvalidArgument("expression nests too deeply for the fast evaluator");
        return d;
      }
    }
  }

  std::vector<Op> code_;
};

}  // namespace serieslab::expr
