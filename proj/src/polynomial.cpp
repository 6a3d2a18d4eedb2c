#include "gramsos/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "gramsos/error.hpp"

namespace gramsos {

int Monomial::degree() const {
  return std::accumulate(exponents.begin(), exponents.end(), 0);
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out = *this;
  for (std::size_t i = 0; i < out.exponents.size(); ++i)
    out.exponents[i] += other.exponents[i];
  return out;
}

std::optional<Monomial> Monomial::divide(const Monomial& other) const {
  Monomial out = *this;
  for (std::size_t i = 0; i < out.exponents.size(); ++i) {
    out.exponents[i] -= other.exponents[i];
    if (out.exponents[i] < 0) return std::nullopt;
  }
  return out;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(a.exponents.begin(), a.exponents.end(),
                                      b.exponents.begin(), b.exponents.end());
}

std::string to_string(const Monomial& m) {
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < m.exponents.size(); ++i) {
    if (m.exponents[i] == 0) continue;
    if (!first) out << "*";
    out << "x" << (i + 1);
    if (m.exponents[i] > 1) out << "^" << m.exponents[i];
    first = false;
  }
  if (first) return "1";
  return out.str();
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial f(nvars);
  f.set_coeff(Monomial(std::vector<int>(nvars, 0)), c);
  return f;
}

Polynomial Polynomial::variable(int nvars, int index) {
  if (index < 1 || index > nvars)
    throw Error("variable index out of range: x" + std::to_string(index));
  Polynomial f(nvars);
  std::vector<int> e(nvars, 0);
  e[index - 1] = 1;
  f.set_coeff(Monomial(std::move(e)), 1);
  return f;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

bool Polynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  const int d = terms_.begin()->first.degree();
  for (const auto& [m, c] : terms_)
    if (m.degree() != d) return false;
  return true;
}

Rational Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::set_coeff(const Monomial& m, const Rational& c) {
  if (m.nvars() != nvars_) throw Error("monomial/polynomial nvars mismatch");
  if (c == 0)
    terms_.erase(m);
  else
    terms_[m] = c;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (m.nvars() != nvars_) throw Error("monomial/polynomial nvars mismatch");
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (c != 0) terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

void Polynomial::check_same_vars(const Polynomial& other) const {
  if (nvars_ != other.nvars_)
    throw Error("nvars mismatch: " + std::to_string(nvars_) + " vs " +
                std::to_string(other.nvars_));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  check_same_vars(other);
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  check_same_vars(other);
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_same_vars(other);
  Polynomial out(nvars_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return nvars_ == other.nvars_ && terms_ == other.terms_;
}

Rational Polynomial::eval(const std::vector<Rational>& point) const {
  if (static_cast<int>(point.size()) != nvars_)
    throw Error("evaluation point has " + std::to_string(point.size()) +
                " coordinates, polynomial has " + std::to_string(nvars_) +
                " variables");
  Rational total(0);
  for (const auto& [m, c] : terms_) {
    Rational term = c;
    for (int i = 0; i < nvars_; ++i) {
      const int e = m.exponents[i];
      if (e == 0) continue;
      Rational p;
      mpz_pow_ui(p.get_num_mpz_t(), point[i].get_num_mpz_t(), e);
      mpz_pow_ui(p.get_den_mpz_t(), point[i].get_den_mpz_t(), e);
      term *= p;
    }
    total += term;
  }
  return total;
}

namespace {

// Hand-rolled scanner for the term grammar; positions feed ParseError.
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  // Returns terms as (exponent map keyed by 1-based index, coefficient).
  struct RawTerm {
    std::map<int, int> powers;
    Rational coef;
  };

  std::vector<RawTerm> parse() {
    std::vector<RawTerm> terms;
    skip_ws();
    if (eof()) throw ParseError("empty polynomial", pos_);
    int sign = 1;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1 : 1;
      ++pos_;
    }
    terms.push_back(parse_term(sign));
    skip_ws();
    while (!eof()) {
      char op = peek();
      if (op != '+' && op != '-')
        throw ParseError(std::string("expected '+' or '-', got '") + op + "'",
                         pos_);
      ++pos_;
      terms.push_back(parse_term(op == '-' ? -1 : 1));
      skip_ws();
    }
    return terms;
  }

  int max_index = 0;

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  Integer parse_int() {
    skip_ws();
    std::size_t start = pos_;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start) throw ParseError("expected an integer", pos_);
    return Integer(text_.substr(start, pos_ - start), 10);
  }

  RawTerm parse_term(int sign) {
    skip_ws();
    if (eof()) throw ParseError("expected a term", pos_);
    RawTerm term;
    term.coef = sign;
    bool have_any = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      Integer num = parse_int();
      Integer den = 1;
      if (!eof() && peek() == '/') {
        ++pos_;
        std::size_t den_pos = pos_;
        den = parse_int();
        if (den == 0) throw ParseError("zero denominator", den_pos);
      }
      Rational c(num, den);
      c.canonicalize();
      term.coef *= c;
      have_any = true;
      skip_ws();
      if (!eof() && peek() == '*') {
        ++pos_;
        parse_factor(term);
      } else {
        return term;  // bare constant
      }
    } else {
      parse_factor(term);
    }
    have_any = true;
    skip_ws();
    while (!eof() && peek() == '*') {
      ++pos_;
      parse_factor(term);
      skip_ws();
    }
    (void)have_any;
    return term;
  }

  void parse_factor(RawTerm& term) {
    skip_ws();
    if (eof() || peek() != 'x')
      throw ParseError("expected a variable like 'x1'", pos_);
    ++pos_;
    std::size_t idx_pos = pos_;
    Integer idx_big = parse_int();
    if (idx_big < 1 || idx_big > 16384)
      throw ParseError("variable index out of range", idx_pos);
    int idx = static_cast<int>(idx_big.get_si());
    max_index = std::max(max_index, idx);
    int exp = 1;
    skip_ws();
    if (!eof() && peek() == '^') {
      ++pos_;
      std::size_t exp_pos = pos_;
      Integer e = parse_int();
      if (e > 1000000) throw ParseError("exponent too large", exp_pos);
      exp = static_cast<int>(e.get_si());
    }
    term.powers[idx] += exp;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, std::optional<int> nvars) {
  Parser parser(text);
  auto raw = parser.parse();
  int s = nvars.value_or(parser.max_index);
  if (parser.max_index > s)
    throw ParseError("polynomial uses x" + std::to_string(parser.max_index) +
                     " but only " + std::to_string(s) +
                     " variables were declared");
  Polynomial f(s);
  for (const auto& term : raw) {
    std::vector<int> e(s, 0);
    for (const auto& [idx, exp] : term.powers) e[idx - 1] = exp;
    f.add_term(Monomial(std::move(e)), term.coef);
  }
  return f;
}

std::string to_string(const Polynomial& f) {
  if (f.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  // Highest-degree terms first.
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool neg = c < 0;
    Rational mag = neg ? Rational(-c) : c;
    if (first) {
      if (neg) out << "-";
    } else {
      out << (neg ? " - " : " + ");
    }
    const bool is_const = m.is_constant();
    if (mag != 1 || is_const) {
      out << to_string(mag);
      if (!is_const) out << "*";
    }
    if (!is_const) out << to_string(m);
    first = false;
  }
  return out.str();
}

Polynomial expand_square_sum(const std::vector<Polynomial>& factors) {
  if (factors.empty()) return Polynomial(0);
  const int s = factors.front().nvars();
  Polynomial total(s);
  for (const auto& g : factors) {
    if (g.nvars() != s)
      throw Error("nvars mismatch among square-sum factors");
    total = total + g * g;
  }
  return total;
}

Rational eval_poly(const Polynomial& f, const std::vector<Rational>& point) {
  return f.eval(point);
}

}  // namespace gramsos
