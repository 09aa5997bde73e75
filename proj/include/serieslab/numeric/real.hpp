#pragma once

// Thin RAII value type over an MPFR number. Precision is carried per value;
// binary operations round to the larger operand precision.

#include <mpfr.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>

#include "serieslab/error.hpp"

namespace serieslab::numeric {

inline constexpr mpfr_prec_t kDefaultBits = 256;

namespace detail {

// The extended-range arithmetic relies on MPFR's full exponent range; the
// library default (about 2^30 bits) is too narrow for e^(2^39).
inline void ensure_exponent_range() {
  thread_local bool done = false;
  if (!done) {
    mpfr_set_emax(mpfr_get_emax_max());
    mpfr_set_emin(mpfr_get_emin_min());
    done = true;
  }
}

}  // namespace detail

class Real {
 public:
  Real() : Real(kDefaultBits) {}

  explicit Real(mpfr_prec_t bits) {
    detail::ensure_exponent_range();
    mpfr_init2(v_, std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN));
    mpfr_set_zero(v_, 1);
  }

  Real(long double x, mpfr_prec_t bits) : Real(bits) { mpfr_set_ld(v_, x, MPFR_RNDN); }
  Real(long x, mpfr_prec_t bits) : Real(bits) { mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(int x, mpfr_prec_t bits) : Real(static_cast<long>(x), bits) {}

  Real(const Real& other) : Real(mpfr_get_prec(other.v_)) { mpfr_set(v_, other.v_, MPFR_RNDN); }

  Real(Real&& other) noexcept {
    // Steal the limbs; leave `other` as an unallocated shell the destructor skips.
    v_[0] = other.v_[0];
    other.v_[0]._mpfr_d = nullptr;
  }

  Real& operator=(const Real& other) {
    if (this != &other) {
      if (v_[0]._mpfr_d == nullptr) {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
      } else {
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      }
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }

  Real& operator=(Real&& other) noexcept {
    if (this != &other) {
      if (v_[0]._mpfr_d != nullptr) mpfr_clear(v_);
      v_[0] = other.v_[0];
      other.v_[0]._mpfr_d = nullptr;
    }
    return *this;
  }

  ~Real() {
    if (v_[0]._mpfr_d != nullptr) mpfr_clear(v_);
  }

  /// Parses a decimal literal ("1.5e-3", "-2", "inf" is rejected).
  static Real parse(std::string_view text, mpfr_prec_t bits) {
    Real r(bits);
    std::string s(text);
    char* end = nullptr;
    if (!s.empty()) mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
    if (s.empty() || end != s.c_str() + s.size() || mpfr_nan_p(r.v_) || mpfr_inf_p(r.v_)) {
      throw InvalidArgument("not a decimal number: '" + s + "'");
    }
    return r;
  }

  static Real e(mpfr_prec_t bits) {
    Real one(1L, bits);
    return exp(one);
  }

  static Real ln2(mpfr_prec_t bits) {
    Real r(bits);
    mpfr_const_log2(r.v_, MPFR_RNDN);
    return r;
  }

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Binary exponent e such that |x| = m * 2^e with m in [1/2, 1).
  long exponent2() const { return is_zero() ? 0 : static_cast<long>(mpfr_get_exp(v_)); }

  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  /// Scientific notation with `digits` significant decimal digits.
  std::string to_string(int digits = 20) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return sign() < 0 ? "-inf" : "inf";
    if (is_zero()) return "0";
    mpfr_exp_t exp10 = 0;
    char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<size_t>(std::max(digits, 2)), v_, MPFR_RNDN);
    std::string mant(raw);
    mpfr_free_str(raw);
    std::string out;
    if (!mant.empty() && mant[0] == '-') {
      out.push_back('-');
      mant.erase(0, 1);
    }
    // trim trailing zeros of the mantissa, keep at least one digit
    while (mant.size() > 1 && mant.back() == '0') mant.pop_back();
    out.push_back(mant[0]);
    if (mant.size() > 1) {
      out.push_back('.');
      out.append(mant.substr(1));
    }
    const long e10 = static_cast<long>(exp10) - 1;
    if (e10 != 0) out += "e" + std::to_string(e10);
    return out;
  }

  friend Real operator-(const Real& a) {
    Real r(a.precision());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

#define SERIESLAB_REAL_BINOP(op, fn)                                  \
  friend Real operator op(const Real& a, const Real& b) {             \
    Real r(std::max(a.precision(), b.precision()));                   \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                  \
    return r;                                                         \
  }                                                                   \
  Real& operator op##=(const Real& b) {                               \
    if (b.precision() > precision()) mpfr_prec_round(v_, b.precision(), MPFR_RNDN); \
    fn(v_, v_, b.v_, MPFR_RNDN);                                      \
    return *this;                                                     \
  }
  SERIESLAB_REAL_BINOP(+, mpfr_add)
  SERIESLAB_REAL_BINOP(-, mpfr_sub)
  SERIESLAB_REAL_BINOP(*, mpfr_mul)
  SERIESLAB_REAL_BINOP(/, mpfr_div)
#undef SERIESLAB_REAL_BINOP

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

#define SERIESLAB_REAL_FN(name, fn)                \
  friend Real name(const Real& a) {                \
    Real r(a.precision());                         \
    fn(r.v_, a.v_, MPFR_RNDN);                     \
    return r;                                      \
  }
  SERIESLAB_REAL_FN(log, mpfr_log)
  SERIESLAB_REAL_FN(exp, mpfr_exp)
  SERIESLAB_REAL_FN(log1p, mpfr_log1p)
  SERIESLAB_REAL_FN(expm1, mpfr_expm1)
  SERIESLAB_REAL_FN(sqrt, mpfr_sqrt)
  SERIESLAB_REAL_FN(abs, mpfr_abs)
  SERIESLAB_REAL_FN(floor, mpfr_rint_floor)
  SERIESLAB_REAL_FN(ceil, mpfr_rint_ceil)
#undef SERIESLAB_REAL_FN

  friend Real pow(const Real& a, const Real& b) {
    Real r(std::max(a.precision(), b.precision()));
    mpfr_pow(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }

  /// Same value rounded to a different precision.
  Real with_precision(mpfr_prec_t bits) const {
    Real r(bits);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

 private:
  mpfr_t v_;
};

}  // namespace serieslab::numeric
