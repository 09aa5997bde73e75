#pragma once

// Extended-range real numbers.
//
// An ExtScalar is either a plain MPFR value (|ln|x|| <= kPlainLogLimit) or a
// tower exp^h(r) with canonical residue r in [1, e). Towers may carry a sign
// and may be reciprocal (magnitude 1/exp^h(r)), which covers the tiny terms
// a_n and the huge negative logarithms that show up at n = exp(exp(40)).
//
// Arithmetic that has to drop the smaller of two operands because their
// magnitudes differ beyond the working precision marks the result as
// absorbed. The flag is sticky through later operations.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "serieslab/error.hpp"
#include "serieslab/numeric/real.hpp"

namespace serieslab::numeric {

/// Working precision of the extended arithmetic.
struct Precision {
  unsigned significand_bits = 256;
  unsigned max_tower_level = 6;

  void validate() const {
    if (significand_bits < 64) throw InvalidArgument("precision must be at least 64 bits");
    if (max_tower_level < 4) throw InvalidArgument("max_tower_level must be at least 4");
  }
};

// Natural-log bound of the plain range. MPFR holds far more than this; the
// headroom keeps products and powers of plain values from overflowing.
inline constexpr double kPlainLogLimit = 549755813888.0;  // 2^39

class ExtScalar {
 public:
  ExtScalar() : ExtScalar(Precision{}) {}

  explicit ExtScalar(const Precision& p)
      : sign_(0), level_(0), reciprocal_(false), mag_(static_cast<mpfr_prec_t>(p.significand_bits)),
        max_level_(p.max_tower_level) {}

  ExtScalar(long double x, const Precision& p = {}) : ExtScalar(p) {
    set_plain(Real(x, static_cast<mpfr_prec_t>(p.significand_bits)));
  }
  ExtScalar(long x, const Precision& p = {}) : ExtScalar(p) {
    set_plain(Real(x, static_cast<mpfr_prec_t>(p.significand_bits)));
  }
  ExtScalar(int x, const Precision& p = {}) : ExtScalar(static_cast<long>(x), p) {}

  /// Wraps a finite MPFR value; converts to tower form when out of plain range.
  static ExtScalar from_real(const Real& r, unsigned max_tower_level = Precision{}.max_tower_level) {
    if (!r.is_finite()) throw DomainError("non-finite value");
    ExtScalar x(Precision{static_cast<unsigned>(r.precision()), max_tower_level});
    x.set_plain(r);
    return x;
  }

  /// exp^h(r), canonicalized. Accepts any finite r (not only [1, e)).
  static ExtScalar tower(unsigned h, const Real& r, unsigned max_tower_level = Precision{}.max_tower_level) {
    ExtScalar v = from_real(r, max_tower_level);
    for (unsigned i = 0; i < h; ++i) v = exp_of(v);
    return v;
  }

  /// Decimal literal or tower notation "exp^h(r)", optionally signed and
  /// optionally reciprocal ("1/exp^h(r)").
  static ExtScalar parse(std::string_view text, const Precision& p = {}) {
    std::string s;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    const auto bits = static_cast<mpfr_prec_t>(p.significand_bits);
    bool negative = false;
    bool reciprocal = false;
    std::string body = s;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body.rfind("1/exp^", 0) == 0) {
      reciprocal = true;
      body.erase(0, 2);
    }
    if (body.rfind("exp^", 0) == 0) {
      const auto open = body.find('(');
      if (open == std::string::npos || body.back() != ')') throw InvalidArgument("bad tower literal: " + s);
      const std::string hs = body.substr(4, open - 4);
      if (hs.empty() || !std::all_of(hs.begin(), hs.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw InvalidArgument("bad tower level: " + s);
      const unsigned h = static_cast<unsigned>(std::stoul(hs));
      ExtScalar v = tower(h, Real::parse(body.substr(open + 1, body.size() - open - 2), bits), p.max_tower_level);
      if (reciprocal) v = v.reciprocal();
      return negative ? -v : v;
    }
    if (reciprocal) throw InvalidArgument("bad literal: " + s);
    ExtScalar v = from_real(Real::parse(body, bits), p.max_tower_level);
    return negative ? -v : v;
  }

  // --- observers -----------------------------------------------------------

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  bool is_plain() const { return level_ == 0; }
  bool is_tower() const { return level_ > 0; }
  bool is_reciprocal() const { return reciprocal_; }
  /// Tower level h (0 for plain values).
  unsigned level() const { return level_; }
  /// Tower residue r in [1, e), or |x| for plain values.
  const Real& residue() const { return mag_; }
  bool absorbed() const { return absorbed_; }
  mpfr_prec_t precision() const { return mag_.precision(); }
  unsigned max_tower_level() const { return max_level_; }
  Precision precision_config() const { return {static_cast<unsigned>(precision()), max_level_}; }

  /// Signed plain value; throws RangeError for tower forms.
  Real to_real() const {
    if (is_tower()) throw RangeError("value " + to_string() + " exceeds the plain range");
    return sign_ < 0 ? -mag_ : mag_;
  }

  bool is_integer() const { return is_zero() || (is_plain() && mag_.is_integer()); }

  long double to_long_double() const {
    if (is_zero()) return 0.0L;
    if (is_tower()) {
      const long double big = reciprocal_ ? 0.0L : std::numeric_limits<long double>::infinity();
      return sign_ < 0 ? -big : big;
    }
    const long double m = mag_.to_long_double();
    return sign_ < 0 ? -m : m;
  }
  double to_double() const { return static_cast<double>(to_long_double()); }

  std::string to_string(int digits = 20) const {
    if (is_zero()) return "0";
    std::string out = sign_ < 0 ? "-" : "";
    if (is_plain()) return out + mag_.to_string(digits);
    if (reciprocal_) out += "1/";
    return out + "exp^" + std::to_string(level_) + "(" + mag_.to_string(digits) + ")";
  }

  ExtScalar with_absorbed(bool flag = true) const {
    ExtScalar r = *this;
    r.absorbed_ = r.absorbed_ || flag;
    return r;
  }

  ExtScalar with_precision(const Precision& p) const {
    ExtScalar r = *this;
    r.mag_ = mag_.with_precision(static_cast<mpfr_prec_t>(p.significand_bits));
    r.max_level_ = p.max_tower_level;
    return r;
  }

  // --- elementary operations ------------------------------------------------

  friend ExtScalar operator-(const ExtScalar& x) {
    ExtScalar r = x;
    r.sign_ = -r.sign_;
    return r;
  }

  ExtScalar abs_value() const {
    ExtScalar r = *this;
    r.sign_ = r.sign_ == 0 ? 0 : 1;
    return r;
  }

  ExtScalar reciprocal() const {
    if (is_zero()) throw DivisionByZero();
    ExtScalar r = *this;
    if (is_plain()) {
      r.set_plain(Real(1L, precision()) / (sign_ < 0 ? -mag_ : mag_));
      r.absorbed_ = absorbed_;
    } else {
      r.reciprocal_ = !r.reciprocal_;
    }
    return r;
  }

  /// ln|x| as a signed value.
  static ExtScalar log_magnitude(const ExtScalar& x) {
    if (x.is_zero()) throw DomainError("logarithm of zero");
    ExtScalar r(x.precision_config());
    if (x.is_plain()) {
      // Guard bits so that exp(ln x) recovers x to working precision: the
      // absolute error of ln x must stay below 2^-p, not the relative one.
      mpfr_prec_t guard = 0;
      for (long e = std::labs(x.mag_.exponent2()); e > 0; e >>= 1) ++guard;
      r.set_plain(log(x.mag_.with_precision(x.precision() + guard + 2)));
    } else {
      r = tower(x.level_ - 1, x.mag_, x.max_level_);
      if (x.reciprocal_) r = -r;
    }
    r.absorbed_ = x.absorbed_;
    return r;
  }

  /// sign * exp(log_mag), canonicalized.
  static ExtScalar exp_of(const ExtScalar& log_mag, int sign = 1) {
    ExtScalar r(log_mag.precision_config());
    r.absorbed_ = log_mag.absorbed_;
    if (sign == 0) return r;
    if (log_mag.is_zero()) {
      r.set_plain(Real(1L, log_mag.precision()));
    } else if (log_mag.is_plain()) {
      if (log_mag.mag_ <= Real(static_cast<long double>(kPlainLogLimit), 64)) {
        r.set_plain(exp(log_mag.to_real()));
      } else {
        r.sign_ = 1;
        r.level_ = 1;
        r.reciprocal_ = log_mag.sign_ < 0;
        r.mag_ = log_mag.mag_;
        r.normalize_residue();
      }
    } else if (log_mag.reciprocal_) {
      // |log_mag| is below 2^-(2^39): exp rounds to exactly one.
      r.set_plain(Real(1L, log_mag.precision()));
    } else {
      r.sign_ = 1;
      r.level_ = log_mag.level_ + 1;
      r.reciprocal_ = log_mag.sign_ < 0;
      r.mag_ = log_mag.mag_;
      r.check_level();
    }
    if (sign < 0) r.sign_ = -r.sign_;
    return r;
  }

  /// Three-way comparison of |x| and |y| (both nonzero).
  static int compare_magnitude(const ExtScalar& x, const ExtScalar& y) {
    const int kx = x.kind_rank(), ky = y.kind_rank();
    if (kx != ky) return kx < ky ? -1 : 1;
    int c = 0;
    if (x.is_plain()) {
      const auto o = x.mag_ <=> y.mag_;
      c = o < 0 ? -1 : (o > 0 ? 1 : 0);
    } else {
      if (x.level_ != y.level_) {
        c = x.level_ < y.level_ ? -1 : 1;
      } else {
        const auto o = x.mag_ <=> y.mag_;
        c = o < 0 ? -1 : (o > 0 ? 1 : 0);
      }
      if (x.reciprocal_) c = -c;
    }
    return c;
  }

  friend int compare(const ExtScalar& x, const ExtScalar& y) {
    if (x.sign_ != y.sign_) return x.sign_ < y.sign_ ? -1 : 1;
    if (x.sign_ == 0) return 0;
    const int c = compare_magnitude(x, y);
    return x.sign_ > 0 ? c : -c;
  }

  friend bool operator==(const ExtScalar& x, const ExtScalar& y) { return compare(x, y) == 0; }
  friend std::strong_ordering operator<=>(const ExtScalar& x, const ExtScalar& y) {
    const int c = compare(x, y);
    return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend ExtScalar operator+(const ExtScalar& x, const ExtScalar& y) { return add(x, y); }
  friend ExtScalar operator-(const ExtScalar& x, const ExtScalar& y) { return add(x, -y); }
  friend ExtScalar operator*(const ExtScalar& x, const ExtScalar& y) { return mul(x, y); }
  friend ExtScalar operator/(const ExtScalar& x, const ExtScalar& y) {
    if (y.is_zero()) throw DivisionByZero();
    return mul(x, y.reciprocal());
  }
  ExtScalar& operator+=(const ExtScalar& y) { return *this = *this + y; }
  ExtScalar& operator-=(const ExtScalar& y) { return *this = *this - y; }
  ExtScalar& operator*=(const ExtScalar& y) { return *this = *this * y; }
  ExtScalar& operator/=(const ExtScalar& y) { return *this = *this / y; }

  static ExtScalar add(const ExtScalar& x, const ExtScalar& y) {
    if (x.is_zero()) return y.with_absorbed(x.absorbed_).with_min_precision(x);
    if (y.is_zero()) return x.with_absorbed(y.absorbed_).with_min_precision(y);
    const bool sticky = x.absorbed_ || y.absorbed_;
    if (x.is_plain() && y.is_plain()) {
      ExtScalar r = from_real(x.to_real() + y.to_real(), std::max(x.max_level_, y.max_level_));
      r.absorbed_ = sticky;
      return r;
    }
    const bool x_big = compare_magnitude(x, y) >= 0;
    const ExtScalar& big = x_big ? x : y;
    const ExtScalar& small = x_big ? y : x;
    const ExtScalar lb = log_magnitude(big);
    const ExtScalar ls = log_magnitude(small);
    const ExtScalar gap = lb - ls;  // >= 0
    const mpfr_prec_t bits = std::max(x.precision(), y.precision());
    const Real cutoff = Real::ln2(bits) * Real(static_cast<long>(bits + 2), bits);
    if (gap.is_tower() || gap.mag_ > cutoff) return big.with_absorbed(true);
    const bool same_sign = big.sign_ == small.sign_;
    Real shift(bits);
    if (same_sign) {
      shift = log1p(exp(-gap.to_real()));
    } else {
      if (gap.is_zero()) {
        ExtScalar z(big.precision_config());
        z.absorbed_ = true;
        return z;
      }
      shift = log(-expm1(-gap.to_real()));
    }
    ExtScalar r = exp_of(lb + from_real(shift, big.max_level_), big.sign_);
    r.absorbed_ = r.absorbed_ || sticky;
    return r;
  }

  static ExtScalar mul(const ExtScalar& x, const ExtScalar& y) {
    const bool sticky = x.absorbed_ || y.absorbed_;
    if (x.is_zero() || y.is_zero()) {
      ExtScalar z(x.precision() >= y.precision() ? x.precision_config() : y.precision_config());
      z.absorbed_ = sticky;
      return z;
    }
    const int s = x.sign_ * y.sign_;
    ExtScalar r;
    if (x.is_plain() && y.is_plain()) {
      r = from_real(x.mag_ * y.mag_, std::max(x.max_level_, y.max_level_));
      if (s < 0) r = -r;
    } else {
      r = exp_of(log_magnitude(x) + log_magnitude(y), s);
    }
    r.absorbed_ = r.absorbed_ || sticky;
    return r;
  }

 private:
  int kind_rank() const {
    if (is_plain()) return 1;
    return reciprocal_ ? 0 : 2;
  }

  ExtScalar with_min_precision(const ExtScalar& other) const {
    if (other.precision() <= precision()) return *this;
    return with_precision(other.precision_config());
  }

  void set_plain(const Real& value) {
    if (!value.is_finite()) throw DomainError("non-finite value");
    level_ = 0;
    reciprocal_ = false;
    if (value.is_zero()) {
      sign_ = 0;
      mag_ = Real(value.precision());
      return;
    }
    sign_ = value.sign() < 0 ? -1 : 1;
    Real m = abs(value);
    const double ln2 = 0.69314718055994530942;
    const double approx = static_cast<double>(m.exponent2()) * ln2;
    bool plain = std::abs(approx) < kPlainLogLimit - 2.0;
    if (!plain && std::abs(approx) <= kPlainLogLimit + 2.0) {
      plain = abs(log(m)) <= Real(static_cast<long double>(kPlainLogLimit), 64);
    }
    if (plain) {
      mag_ = std::move(m);
      return;
    }
    const Real lg = log(m);
    level_ = 1;
    reciprocal_ = lg.sign() < 0;
    mag_ = abs(lg);
    normalize_residue();
  }

  // Brings a tower residue into [1, e) by moving levels up.
  void normalize_residue() {
    const Real e = Real::e(mag_.precision());
    while (mag_ >= e) {
      mag_ = log(mag_);
      ++level_;
    }
    check_level();
  }

  void check_level() const {
    if (level_ > max_level_) {
      throw RangeError("tower level " + std::to_string(level_) + " exceeds the configured maximum " +
                       std::to_string(max_level_));
    }
  }

  int sign_;
  unsigned level_;
  bool reciprocal_;
  Real mag_;
  unsigned max_level_;
  bool absorbed_ = false;
};

// --- free functions -----------------------------------------------------------

enum class ArithOp { Add, Sub, Mul, Div, Pow };

ExtScalar ext_pow(const ExtScalar& x, const ExtScalar& y);

/// Result of a checked arithmetic operation.
struct ArithResult {
  ExtScalar value;
  bool absorbed = false;  // the smaller operand vanished at working precision
};

inline ArithResult arith(ArithOp op, const ExtScalar& x, const ExtScalar& y) {
  ExtScalar v;
  switch (op) {
    case ArithOp::Add: v = x + y; break;
    case ArithOp::Sub: v = x - y; break;
    case ArithOp::Mul: v = x * y; break;
    case ArithOp::Div: v = x / y; break;
    case ArithOp::Pow: v = ext_pow(x, y); break;
  }
  const bool fresh = v.absorbed() && !x.absorbed() && !y.absorbed();
  return {v, fresh};
}

inline ExtScalar ext_ln(const ExtScalar& x) {
  if (x.sign() <= 0) throw DomainError("logarithm of non-positive value " + x.to_string());
  return ExtScalar::log_magnitude(x);
}

inline ExtScalar ext_exp(const ExtScalar& x) { return ExtScalar::exp_of(x); }

/// k-fold natural logarithm; iter_ln(0, x) = x.
inline ExtScalar iter_ln(unsigned k, const ExtScalar& x) {
  ExtScalar v = x;
  for (unsigned i = 0; i < k; ++i) {
    if (v.sign() <= 0) {
      throw DomainError("iterated logarithm of order " + std::to_string(k) + " undefined: ln_(" +
                        std::to_string(i) + ") = " + v.to_string() + " is not positive");
    }
    v = ExtScalar::log_magnitude(v);
  }
  return v;
}

/// k-fold exponential.
inline ExtScalar iter_exp(unsigned k, const ExtScalar& x) {
  ExtScalar v = x;
  for (unsigned i = 0; i < k; ++i) v = ext_exp(v);
  return v;
}

inline ExtScalar ext_pow(const ExtScalar& x, const ExtScalar& y) {
  if (y.is_zero()) return ExtScalar(1L, x.precision_config()).with_absorbed(x.absorbed() || y.absorbed());
  if (x.is_zero()) {
    if (y.sign() < 0) throw DivisionByZero();
    return x;
  }
  int sign = 1;
  if (x.sign() < 0) {
    if (!y.is_integer()) throw DomainError("non-integer power of negative base " + x.to_string());
    const Real yr = y.to_real();
    Real half = yr / Real(2L, yr.precision());
    if (!half.is_integer()) sign = -1;
  }
  if (x.is_plain() && y.is_plain()) {
    const Real lx = log(x.residue());
    const Real l = lx * y.to_real();
    if (abs(l) <= Real(static_cast<long double>(kPlainLogLimit), 64)) {
      ExtScalar r = ExtScalar::from_real(pow(x.residue(), y.to_real()), std::max(x.max_tower_level(), y.max_tower_level()));
      if (sign < 0) r = -r;
      return r.with_absorbed(x.absorbed() || y.absorbed());
    }
  }
  return ExtScalar::exp_of(y * ExtScalar::log_magnitude(x), sign);
}

/// ln(1 + x), accurate for tiny x.
inline ExtScalar ext_ln1p(const ExtScalar& x) {
  if (x.is_zero()) return x;
  if (x.is_plain()) {
    const Real v = x.to_real();
    if (v <= Real(-1L, 64)) throw DomainError("ln1p of value <= -1");
    return ExtScalar::from_real(log1p(v), x.max_tower_level()).with_absorbed(x.absorbed());
  }
  if (x.is_reciprocal()) return x;  // ln1p(x) = x (1 - x/2 + ...) rounds to x
  if (x.sign() < 0) throw DomainError("ln1p of value <= -1");
  return ext_ln(x).with_absorbed(true);
}

/// exp(x) - 1, accurate for tiny x.
inline ExtScalar ext_expm1(const ExtScalar& x) {
  if (x.is_zero()) return x;
  if (x.is_plain()) {
    const Real v = x.to_real();
    if (abs(v) < Real(1048576L, 64)) {
      return ExtScalar::from_real(expm1(v), x.max_tower_level()).with_absorbed(x.absorbed());
    }
    return ext_exp(x) - ExtScalar(1L, x.precision_config());
  }
  if (x.is_reciprocal()) return x;
  return ext_exp(x) - ExtScalar(1L, x.precision_config());
}

inline ExtScalar ext_sqrt(const ExtScalar& x) {
  if (x.sign() < 0) throw DomainError("square root of negative value");
  if (x.is_zero()) return x;
  return ext_pow(x, ExtScalar(0.5L, x.precision_config()));
}

inline ExtScalar abs(const ExtScalar& x) { return x.abs_value(); }
inline ExtScalar max(const ExtScalar& a, const ExtScalar& b) { return compare(a, b) >= 0 ? a : b; }
inline ExtScalar min(const ExtScalar& a, const ExtScalar& b) { return compare(a, b) <= 0 ? a : b; }

}  // namespace serieslab::numeric
