#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"

namespace jhlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/*
 * Scalar policy.
 *
 * Every container and algorithm in the library is a template over a scalar
 * type S.  Two instantiations are supported: Rational (exact, the default for
 * every identity check) and double (fast, for growth experiments).  The
 * traits below are the only place where the two differ.
 */
template <class S>
struct scalar_traits;

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline Integer parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw Error(ErrorKind::invalid_input, "malformed integer '" + std::string(s) + "'");
  Integer value{std::string(s)};
  return negative ? Integer(-value) : value;
}

inline Integer pow10(unsigned e) {
  Integer p = 1;
  for (unsigned i = 0; i < e; ++i) p *= 10;
  return p;
}

/// Parses "p/q", an integer, or a decimal with optional exponent into an
/// exact rational.  "0.1" is exactly 1/10.
inline Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorKind::invalid_input, "empty scalar");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::invalid_input, "zero denominator in '" + std::string(text) + "'");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return Rational(num, den);
  }

  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || exp_text.empty())
      throw Error(ErrorKind::invalid_input, "malformed exponent in '" + std::string(text) + "'");
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view whole = mantissa.substr(0, dot);
    std::string_view frac = mantissa.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty()))
      throw Error(ErrorKind::invalid_input, "malformed decimal '" + std::string(text) + "'");
    digits = std::string(whole) + std::string(frac);
    fraction_digits = static_cast<long>(frac.size());
  } else {
    if (!all_digits(mantissa)) throw Error(ErrorKind::invalid_input, "malformed number '" + std::string(text) + "'");
    digits = std::string(mantissa);
  }
  long shift = exponent - fraction_digits;
  if (shift > 4096 || shift < -4096) throw Error(ErrorKind::invalid_input, "exponent out of range in '" + std::string(text) + "'");

  Rational value{Integer(digits)};
  if (shift > 0) value *= pow10(static_cast<unsigned>(shift));
  if (shift < 0) value /= pow10(static_cast<unsigned>(-shift));
  return negative ? Rational(-value) : value;
}

}  // namespace detail

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view name = "rational";

  static Rational parse(std::string_view text) { return detail::parse_rational(text); }
  static std::string to_string(const Rational& v) { return v.str(); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
  static Rational from_ratio(long long num, long long den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return Rational(Integer(num), Integer(den));
  }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr std::string_view name = "double";

  static double parse(std::string_view text) {
    return detail::parse_rational(text).convert_to<double>();
  }
  static std::string to_string(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }
  static double from_ratio(long long num, long long den) { return static_cast<double>(num) / static_cast<double>(den); }
};

template <class S>
concept Scalar = requires { scalar_traits<S>::exact; };

template <Scalar S>
S abs_value(const S& v) {
  return scalar_traits<S>::abs(v);
}

template <Scalar S>
std::string format_scalar(const S& v) {
  return scalar_traits<S>::to_string(v);
}

template <Scalar S>
double to_double(const S& v) {
  return scalar_traits<S>::to_double(v);
}

}  // namespace jhlab
