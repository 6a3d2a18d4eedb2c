#include "gramsos/rational.hpp"

#include <cctype>
#include <cmath>

#include "gramsos/error.hpp"

namespace gramsos {

Rational rational_from_string(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      Integer num(text, 10);
      return Rational(num);
    }
    Integer num(text.substr(0, slash), 10);
    Integer den(text.substr(slash + 1), 10);
    if (den == 0) throw ParseError("zero denominator in '" + text + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ParseError("invalid rational literal '" + text + "'");
  }
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error("cannot convert non-finite value to rational");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace gramsos
