#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace hedgetree {

// Every quantity in the engine is an exact rational. No float ever enters a
// computation; decimals appear only as a formatting convenience in output.
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

// Parses "num" or "num/den" (den a positive integer, num optionally signed).
// Throws Error(ParseError) on anything else, including "1/0" and "1.5".
Rational parse_rational(std::string_view text);

// Canonical "num/den" form, always with an explicit denominator ("1/3", "-2/1").
std::string to_ratio_string(const Rational& value);

// Approximate decimal rendering (round toward zero), advisory only.
std::string to_decimal_string(const Rational& value, int digits = 6);

std::vector<std::string> to_ratio_strings(const std::vector<Rational>& values);

}  // namespace hedgetree
