#pragma once

#include <cmath>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace rac {

// Arbitrary-precision rational; all protocol arithmetic is closed over the
// rationals, so this gives bit-exact verification runs.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "Float";
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "Exact";
  // mpq_set_d is exact for every finite double.
  static Rational from_double(double v) { return Rational(v); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
};

template <class S>
S from_double(double v) {
  return ScalarTraits<S>::from_double(v);
}

template <class S>
double to_double(const S& v) {
  return ScalarTraits<S>::to_double(v);
}

// Tolerant equality in Float mode, exact equality in Exact mode.
template <class S>
bool same_value(const S& a, const S& b, double tol) {
  if constexpr (ScalarTraits<S>::exact) {
    return a == b;
  } else {
    return std::fabs(a - b) <= tol;
  }
}

template <class S>
S abs_value(const S& v) {
  return v < S(0) ? S(-v) : v;
}

}  // namespace rac
