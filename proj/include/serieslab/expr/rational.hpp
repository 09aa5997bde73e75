#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "serieslab/error.hpp"
#include "serieslab/numeric/real.hpp"

namespace serieslab::expr {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact value of a decimal literal such as "12", "-0.5", "1.5e-3".
inline Rational parse_decimal(std::string_view text) {
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
  BigInt digits = 0;
  long scale = 0;
  bool any = false, dot = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      any = true;
      if (dot) --scale;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw InvalidArgument("not a decimal number: '" + std::string(text) + "'");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
    long e = 0;
    bool edig = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      e = e * 10 + (text[i] - '0');
      if (e > 100000) throw InvalidArgument("exponent too large in '" + std::string(text) + "'");
      edig = true;
    }
    if (!edig) throw InvalidArgument("not a decimal number: '" + std::string(text) + "'");
    scale += eneg ? -e : e;
  }
  if (i != text.size()) throw InvalidArgument("not a decimal number: '" + std::string(text) + "'");
  BigInt p10 = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  Rational r = scale < 0 ? Rational(digits, p10) : Rational(digits * p10);
  return neg ? -r : r;
}

/// Terminating decimal text when the denominator is 2^a 5^b, else "p/q".
inline std::string to_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  BigInt d = den;
  unsigned twos = 0, fives = 0;
  while (d % 2 == 0) d /= 2, ++twos;
  while (d % 5 == 0) d /= 5, ++fives;
  if (d != 1) return num.str() + "/" + den.str();
  const unsigned k = std::max(twos, fives);
  BigInt scaled = num * boost::multiprecision::pow(BigInt(10), k) / den;
  const bool neg = scaled < 0;
  std::string s = (neg ? BigInt(-scaled) : scaled).str();
  if (s.size() <= k) s.insert(0, k + 1 - s.size(), '0');
  s.insert(s.size() - k, ".");
  return (neg ? "-" : "") + s;
}

inline numeric::Real to_real(const Rational& r, mpfr_prec_t bits) {
  const auto num = numeric::Real::parse(boost::multiprecision::numerator(r).str(), bits + 16);
  const auto den = numeric::Real::parse(boost::multiprecision::denominator(r).str(), bits + 16);
  return (num / den).with_precision(bits);
}

inline bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

}  // namespace serieslab::expr
