#pragma once

#include <gmpxx.h>

#include <string>

namespace gramsos {

// Arbitrary-precision rational, always stored reduced with positive
// denominator (gmp canonical form).
using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p", "p/q" or "-p/q". Rejects zero denominators.
Rational rational_from_string(const std::string& text);

// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace gramsos
