#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "serieslab/expr/log_form.hpp"

namespace serieslab::expr {

/// exp^k(1); ln_(k+1) n > 0 exactly when n exceeds it.
inline ExtScalar exp_tower_of_one(int k, const Precision& p = {}) {
  ExtScalar v(1L, p);
  for (int i = 0; i < k; ++i) v = numeric::ext_exp(v);
  return v;
}

/// Domain starts beyond this are out of reach of any summation and saturate.
inline constexpr long long kFarDomain = 1LL << 62;

/// Smallest integer strictly above x, saturating at kFarDomain.
inline long long integer_above(const ExtScalar& x) {
  if (!x.is_plain() || x.to_real() >= numeric::Real(static_cast<long double>(kFarDomain), 64)) return kFarDomain;
  const numeric::Real f = floor(x.to_real());
  return f.to_long() + 1;
}

// Collects the iterated-log applications whose argument is n itself.
inline void collect_direct_logs(const Expr& e, std::vector<int>& depths, bool& indirect) {
  if (e->kind == Kind::Ln || e->kind == Kind::IterLn) {
    const int k = e->kind == Kind::Ln ? 1 : e->k;
    if (e->args[0]->kind == Kind::Var) {
      depths.push_back(k);
    } else if (depends_on_n(e->args[0])) {
      indirect = true;
    }
  }
  for (const auto& a : e->args) collect_direct_logs(a, depths, indirect);
}

/// Smallest integer n where every iterated log of n in e has an argument above
/// exp^(k-1)(1)*(1+1e-6) and e itself evaluates to a positive value.
inline long long infer_n0(const Expr& e, const Bindings& b = {}) {
  std::vector<int> depths;
  bool indirect = false;
  collect_direct_logs(e, depths, indirect);
  long long n0 = 1;
  for (int k : depths) {
    if (k < 1) continue;
    ExtScalar t = exp_tower_of_one(k - 1) * ExtScalar(static_cast<long double>(1.000001L));
    n0 = std::max(n0, integer_above(t));
  }
  auto ok = [&](long long n) {
    try {
      return eval(e, ExtScalar(static_cast<long>(n)), b).sign() > 0;
    } catch (const DomainError&) {
      return false;
    } catch (const DivisionByZero&) {
      return false;
    }
  };
  if (n0 == kFarDomain || (!indirect && ok(n0))) return n0;
  // Arguments that are not plain n: search upward, assuming failures only
  // happen on an initial segment.
  long long lo = n0, hi = n0;
  while (!ok(hi)) {
    lo = hi;
    if (hi > (1LL << 55)) throw PositivityViolation(std::to_string(hi), "no positive domain found");
    hi *= 2;
  }
  if (lo == hi) return hi;
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct PositivityReport {
  bool symbolic = false;            // proved from the log-power form
  long long n0 = 1;                 // start that was checked
  long long positivity_start = 1;   // first n with a positive, defined term
  std::string statistic_domain_start;  // first n where one more log level is defined (decimal)
  std::size_t samples_checked = 0;
};

/// Deterministic positivity check from n0 upward, including tower-scale points.
/// Log-power inputs are decided symbolically.
inline PositivityReport check_positive(const Expr& e, long long n0, const Bindings& b = {}) {
  PositivityReport rep;
  rep.n0 = n0;
  const int depth = max_log_depth(e);
  {
    const ExtScalar s = exp_tower_of_one(depth);
    rep.statistic_domain_start = s.is_plain() ? std::to_string(integer_above(s)) : s.to_string();
  }
  auto witness_of = [](const ExtScalar& n) { return n.is_plain() ? n.to_real().to_string(25) : n.to_string(); };

  if (const auto f = to_log_power(e, b)) {
    rep.symbolic = true;
    // c > 0 by construction; every ln_(i) n with i <= m must be positive.
    const int m = static_cast<int>(f->p.size()) - 1;
    rep.positivity_start = m >= 1 ? integer_above(exp_tower_of_one(m - 1)) : 1;
    if (n0 < rep.positivity_start) {
      throw PositivityViolation(std::to_string(n0), "ln_(" + std::to_string(m) + ") n is not positive");
    }
    return rep;
  }

  std::vector<ExtScalar> grid;
  for (long long n = n0; n < n0 + 64; ++n) grid.emplace_back(static_cast<long>(n));
  for (long double x = std::max<long double>(100.0L, static_cast<long double>(n0)) * 10; x < 1e300L; x *= 1e6L)
    grid.emplace_back(std::floor(x));
  for (unsigned h = 2; h <= 4; ++h)
    for (const char* r : {"1.5", "2", "2.5"})
      grid.push_back(ExtScalar::tower(h, numeric::Real::parse(r, 256)));
  for (const auto& n : grid) {
    ExtScalar v;
    try {
      v = eval(e, n, b);
    } catch (const DomainError& err) {
      throw PositivityViolation(witness_of(n), err.what());
    } catch (const DivisionByZero&) {
      throw PositivityViolation(witness_of(n), "division by zero");
    }
    if (v.sign() <= 0) throw PositivityViolation(witness_of(n), "term is not positive");
    ++rep.samples_checked;
  }
  rep.positivity_start = n0;
  return rep;
}

}  // namespace serieslab::expr
