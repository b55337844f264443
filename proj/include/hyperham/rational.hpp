#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <string>
#include <type_traits>

namespace hyperham {

/// Exact rational number (GMP backed, no expression templates so `auto` is safe).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class T>
inline constexpr bool is_rational_v = std::is_same_v<T, Rational>;

// Coefficient traits shared by Polynomial<C> and Form<C>; C is Rational or double.

template <class C>
bool is_zero(const C& c) {
  return c == 0;
}

template <class C>
double to_double(const C& c) {
  if constexpr (is_rational_v<C>) {
    return c.template convert_to<double>();
  } else {
    return static_cast<double>(c);
  }
}

/// Converts between coefficient types. double -> Rational is exact (every
/// finite double is a dyadic rational).
template <class To, class From>
To coefficient_cast(const From& v) {
  if constexpr (std::is_same_v<To, From>) {
    return v;
  } else if constexpr (is_rational_v<To>) {
    return Rational(v);
  } else {
    return to_double(v);
  }
}

template <class C>
C abs_value(const C& c) {
  if constexpr (is_rational_v<C>) {
    return boost::multiprecision::abs(c);
  } else {
    return std::abs(c);
  }
}

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace hyperham
