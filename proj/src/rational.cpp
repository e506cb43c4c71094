#include "derham/rational.hpp"

#include "derham/errors.hpp"

namespace derham {

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ContractViolation("empty rational literal");
  const auto dot = text.find('.');
  try {
    if (dot == std::string::npos) {
      Rational q(text, 10);
      if (q.get_den() == 0) throw ContractViolation("zero denominator in '" + text + "'");
      q.canonicalize();
      return q;
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    if (digits == "-" || digits == "+" || digits.empty()) throw ContractViolation("bad decimal '" + text + "'");
    if (digits[0] == '+') digits.erase(0, 1);
    const std::size_t frac = text.size() - dot - 1;
    Integer num(digits, 10);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ContractViolation("bad rational literal '" + text + "'");
  }
}

Integer factorial(unsigned k) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), k);
  return r;
}

Integer binomial_z(unsigned n, unsigned k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

Integer double_factorial_odd(int k) {
  Integer r = 1;
  for (int j = 1; j <= 2 * k + 1; j += 2) r *= j;
  return r;
}

Rational pow(const Rational& base, unsigned e) {
  Rational r = 1;
  Rational b = base;
  while (e) {
    if (e & 1u) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

}  // namespace derham
