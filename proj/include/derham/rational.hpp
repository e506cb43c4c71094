#pragma once

#include <gmpxx.h>

#include <string>

namespace derham {

using Rational = mpq_class;
using Integer = mpz_class;

/// Canonical "p/q" or "p" text.
std::string to_string(const Rational& q);
/// Parses "p", "p/q" or a finite decimal such as "-0.25" exactly.
Rational parse_rational(const std::string& text);

Integer factorial(unsigned k);
Integer binomial_z(unsigned n, unsigned k);
/// (2k+1)!! = 1*3*5*...*(2k+1); (-1)!! = 1.
Integer double_factorial_odd(int k);
Rational pow(const Rational& base, unsigned e);

}  // namespace derham
