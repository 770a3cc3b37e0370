#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace solitonkit {

/// Arbitrary-precision exact rational used for every spectral value.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// "p/q" or "p" when the denominator is 1.
inline std::string to_string(const Rational& q) {
  if (denominator_of(q) == 1) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + denominator_of(q).str();
}

/// Parses "p", "p/q" or a plain decimal such as "0.30" exactly.
Rational parse_rational(const std::string& text);

}  // namespace solitonkit
