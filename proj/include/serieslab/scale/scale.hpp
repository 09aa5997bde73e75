#pragma once

// Scale functions w(n): n, ln_(k) n, n^sigma, or a user formula.

#include <string>
#include <vector>

#include "serieslab/expr/sequence.hpp"

namespace serieslab::scale {

using expr::Expr;
using expr::LogLinear;
using expr::Rational;
using numeric::ExtScalar;
using numeric::Precision;
using numeric::Real;

struct AssumptionReport {
  bool proved = false;            // catalog scale, holds by construction
  std::size_t points = 0;
  std::vector<double> increments;  // max_y |w(x+y)/w(x) - 1| along the grid
};

class ScaleFn {
 public:
  enum class Kind { Identity, IterLog, PowerOfN, Custom };

  static ScaleFn identity() { return ScaleFn(Kind::Identity, 0, 1, nullptr); }
  static ScaleFn iter_log(int k) {
    if (k < 1) throw InvalidArgument("iterated-log scale needs k >= 1");
    return ScaleFn(Kind::IterLog, k, 0, nullptr);
  }
  static ScaleFn power(const Rational& sigma) {
    if (sigma <= 0) throw InvalidArgument("power scale needs sigma > 0");
    return ScaleFn(Kind::PowerOfN, 0, sigma, nullptr);
  }
  static ScaleFn custom(const Expr& e) { return ScaleFn(Kind::Custom, 0, 0, e); }

  /// "n", "ln", "lnln", "log_5", "n^0.5", or a formula in n.
  static ScaleFn from_text(const std::string& text) {
    if (text == "n") return identity();
    if (text == "ln") return iter_log(1);
    if (text.size() >= 2 && text.find_first_not_of("ln") == std::string::npos && text.size() % 2 == 0) {
      bool ok = true;
      for (std::size_t i = 0; i < text.size(); i += 2) ok = ok && text.compare(i, 2, "ln") == 0;
      if (ok) return iter_log(static_cast<int>(text.size() / 2));
    }
    if (text.size() == 5 && text.compare(0, 4, "log_") == 0 && text[4] >= '1' && text[4] <= '9')
      return iter_log(text[4] - '0');
    const Expr e = expr::parse(text);
    if (e->kind == expr::Kind::Var) return identity();
    if (e->kind == expr::Kind::Ln && e->args[0]->kind == expr::Kind::Var) return iter_log(1);
    if (e->kind == expr::Kind::IterLn && e->args[0]->kind == expr::Kind::Var) return iter_log(e->k);
    if (e->kind == expr::Kind::Pow && e->args[0]->kind == expr::Kind::Var && e->args[1]->kind == expr::Kind::Const &&
        e->args[1]->value > 0)
      return power(e->args[1]->value);
    if (!expr::params(e).empty()) throw InvalidArgument("scale formula may not contain parameters");
    return custom(e);
  }

  Kind kind() const { return kind_; }
  int k() const { return k_; }
  const Rational& sigma() const { return sigma_; }
  bool is_catalog() const { return kind_ != Kind::Custom; }
  const Expr& expr() const { return expr_; }
  long long n0() const { return n0_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Identity: return "n";
      case Kind::IterLog: {
        if (k_ > 4) return "log_" + std::to_string(k_);
        std::string s;
        for (int i = 0; i < k_; ++i) s += "ln";
        return s;
      }
      case Kind::PowerOfN: return "n^" + expr::to_string(sigma_);
      case Kind::Custom: return expr::print(expr_);
    }
    return "?";
  }

  ExtScalar value(const ExtScalar& n) const { return expr::eval(expr_, n); }

  /// w(n+1) - w(n) without cancellation for catalog scales.
  ExtScalar delta(const ExtScalar& n) const {
    const Precision p = n.precision_config();
    const ExtScalar one(1L, p);
    switch (kind_) {
      case Kind::Identity: return one;
      case Kind::IterLog: {
        // d_1 = ln1p(1/n), d_j = ln1p(d_{j-1} / ln_(j-1) n)
        ExtScalar d = numeric::ext_ln1p(one / n);
        ExtScalar lj = n;
        for (int j = 2; j <= k_; ++j) {
          lj = numeric::ext_ln(lj);
          d = numeric::ext_ln1p(d / lj);
        }
        return d;
      }
      case Kind::PowerOfN: {
        const ExtScalar s = expr::to_ext(sigma_, p);
        return numeric::ext_pow(n, s) * numeric::ext_expm1(s * numeric::ext_ln1p(one / n));
      }
      case Kind::Custom: return custom_delta(n);
    }
    return one;
  }

  /// Symbolic main part of ln delta(n) for catalog scales: the exact
  /// log-linear form of the leading asymptotic increment.
  ///   IterLog(k): -(ln n + lnln n + ... + ln_(k) n)
  ///   PowerOfN:   ln sigma + (sigma - 1) ln n
  LogLinear log_delta_main() const {
    LogLinear L;
    switch (kind_) {
      case Kind::Identity: break;
      case Kind::IterLog:
        for (int d = 1; d <= k_; ++d) L.depth[d] = expr::build::constant(-1);
        break;
      case Kind::PowerOfN:
        if (sigma_ != 1) {
          L.depth[1] = expr::build::constant(sigma_ - 1);
          L.constant = expr::build::ln(expr::build::constant(sigma_));
        }
        break;
      case Kind::Custom: throw InvalidArgument("custom scales have no symbolic increment");
    }
    return L;
  }

  /// ln delta(n) - log_delta_main(n), which tends to 0. Computed from the
  /// per-level factors ln1p(x)/x so nothing large ever cancels.
  ExtScalar log_delta_correction(const ExtScalar& n) const {
    const Precision p = n.precision_config();
    const ExtScalar one(1L, p);
    auto log_ratio = [&](const ExtScalar& x) {
      // ln(ln1p(x)/x); rounds to 0 once x is below the working precision.
      if (!x.is_plain()) return ExtScalar(p);
      return numeric::ext_ln(numeric::ext_ln1p(x) / x);
    };
    switch (kind_) {
      case Kind::Identity: return ExtScalar(p);
      case Kind::IterLog: {
        ExtScalar x = one / n;
        ExtScalar eps = log_ratio(x);
        ExtScalar d = numeric::ext_ln1p(x);
        ExtScalar lj = n;
        for (int j = 2; j <= k_; ++j) {
          lj = numeric::ext_ln(lj);
          x = d / lj;
          eps = eps + log_ratio(x);
          d = numeric::ext_ln1p(x);
        }
        return eps;
      }
      case Kind::PowerOfN: {
        const ExtScalar s = expr::to_ext(sigma_, p);
        const ExtScalar y = s * numeric::ext_ln1p(one / n);
        // expm1(y) n / sigma = (expm1(y)/y) (n ln1p(1/n))
        ExtScalar eps = log_ratio(one / n);
        if (y.is_plain()) eps = eps + numeric::ext_ln(numeric::ext_expm1(y) / y);
        return eps;
      }
      case Kind::Custom: throw InvalidArgument("custom scales have no symbolic increment");
    }
    return ExtScalar(p);
  }

  ExtScalar log_delta(const ExtScalar& n) const {
    if (kind_ == Kind::Custom) return numeric::ext_ln(custom_delta(n));
    return expr::bind(log_delta_main(), {}, n.precision_config()).eval(n, {}) + log_delta_correction(n);
  }

  /// ln_(i) w(n) as a log-linear form in n (i >= 1).
  LogLinear iter_log_of_w(int i) const {
    Expr e = expr_;
    for (int j = 0; j < i; ++j) e = expr::build::ln(e);
    return expr::log_linear(expr::build::exp(e));
  }

  ExtScalar inverse(const ExtScalar& x) const {
    switch (kind_) {
      case Kind::Identity: return x;
      case Kind::IterLog: return numeric::iter_exp(static_cast<unsigned>(k_), x);
      case Kind::PowerOfN: {
        if (x.sign() <= 0) throw RangeError("power scale takes only positive values");
        return numeric::ext_pow(x, expr::to_ext(Rational(1) / sigma_, x.precision_config()));
      }
      case Kind::Custom: return custom_inverse(x);
    }
    return x;
  }

  /// Checks monotonicity (a) and slow increment (b) along the grid.
  AssumptionReport check_assumptions(const std::vector<ExtScalar>& grid) const {
    if (grid.size() < 8) throw InvalidArgument("assumption check needs at least 8 grid points");
    AssumptionReport rep;
    rep.points = grid.size();
    if (is_catalog()) {
      rep.proved = true;
      return rep;
    }
    auto witness = [](const ExtScalar& x) { return x.is_plain() ? x.to_real().to_string(20) : x.to_string(); };
    ExtScalar prev;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const ExtScalar& x = grid[i];
      const ExtScalar wx = value(x);
      if (i > 0 && compare(wx, prev) <= 0) throw AssumptionViolation('a', witness(x), "w is not increasing");
      if (compare(value(x + ExtScalar(1L, x.precision_config())), wx) <= 0)
        throw AssumptionViolation('a', witness(x), "w(x+1) <= w(x)");
      prev = wx;
      double r = 0;
      for (long y : {1L, 2L, 5L}) {
        const ExtScalar q = value(x + ExtScalar(y, x.precision_config())) / wx - ExtScalar(1L, x.precision_config());
        r = std::max(r, std::fabs(q.to_double()));
      }
      if (!rep.increments.empty() && r > rep.increments.back() * (1 + 1e-9))
        throw AssumptionViolation('b', witness(x), "w(x+y)/w(x) - 1 does not decrease");
      rep.increments.push_back(r);
    }
    if (!(rep.increments.back() <= 0.5 * rep.increments.front()))
      throw AssumptionViolation('b', witness(grid.back()), "w(x+y)/w(x) does not approach 1");
    return rep;
  }

 private:
  ScaleFn(Kind kind, int k, const Rational& sigma, const Expr& custom) : kind_(kind), k_(k), sigma_(sigma) {
    using namespace expr::build;
    switch (kind_) {
      case Kind::Identity: expr_ = var(); break;
      case Kind::IterLog: expr_ = k == 1 ? ln(var()) : iter_ln(k, var()); break;
      case Kind::PowerOfN: expr_ = pow(var(), constant(sigma)); break;
      case Kind::Custom: expr_ = custom; break;
    }
    n0_ = expr::infer_n0(expr_);
  }

  ExtScalar custom_delta(const ExtScalar& n) const {
    const Precision p = n.precision_config();
    const Precision p2{2 * p.significand_bits, p.max_tower_level};
    const ExtScalar n2 = n.with_precision(p2);
    const ExtScalar a = value(n2 + ExtScalar(1L, p2));
    const ExtScalar b = value(n2);
    const ExtScalar d = a - b;
    if (d.is_zero() || d.absorbed()) throw CancellationError("w(n+1) - w(n) cancels completely at n = " + n.to_string());
    // bits lost = log2 |w(n)| / |d|
    const ExtScalar lost = numeric::ext_ln(abs(b) / abs(d)) / ExtScalar::from_real(Real::ln2(64));
    if (!b.is_zero() && lost.to_double() > static_cast<double>(p.significand_bits))
      throw CancellationError("w(n+1) - w(n) loses more than half the significand at n = " + n.to_string());
    return d.with_precision(p);
  }

  ExtScalar custom_inverse(const ExtScalar& x) const {
    // Bracket by doubling, then bisect on integers and refine on reals.
    const Precision p = x.precision_config();
    ExtScalar lo(static_cast<long>(n0_), p), hi = lo;
    if (compare(value(lo), x) > 0) throw RangeError("value below the range of the scale");
    int guard = 0;
    while (compare(value(hi), x) < 0) {
      lo = hi;
      hi = hi * ExtScalar(2L, p);
      if (++guard > 4000) throw RangeError("inverse not found");
    }
    for (int i = 0; i < static_cast<int>(p.significand_bits) + 8; ++i) {
      const ExtScalar mid = (lo + hi) / ExtScalar(2L, p);
      (compare(value(mid), x) < 0 ? lo : hi) = mid;
    }
    return hi;
  }

  Kind kind_;
  int k_;
  Rational sigma_;
  Expr expr_;
  long long n0_ = 1;
};

}  // namespace serieslab::scale
