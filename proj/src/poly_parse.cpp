#include <cctype>
#include <string>
#include <vector>

#include "hyperham/polynomial.hpp"

namespace hyperham {
namespace {

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := ('+' | '-') unary | power
// power  := atom ('^' integer)?
// atom   := number | name | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& names)
      : text_(text), names_(names), vars_(static_cast<int>(names.size())) {}

  RationalPolynomial parse() {
    RationalPolynomial p = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw StructuralError("polynomial parse error at position " + std::to_string(pos_) + " in \"" +
                          text_ + "\": " + why);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalPolynomial expr() {
    RationalPolynomial acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  RationalPolynomial term() {
    RationalPolynomial acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        RationalPolynomial d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division only by a nonzero constant");
        acc *= Rational(1) / d.constant_term();
      } else {
        return acc;
      }
    }
  }

  RationalPolynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  RationalPolynomial power() {
    RationalPolynomial base = atom();
    if (!accept('^')) return base;
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int k = std::stoi(text_.substr(start, pos_ - start));
    RationalPolynomial out = RationalPolynomial::constant(vars_, Rational(1));
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
  }

  RationalPolynomial atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RationalPolynomial inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail(std::string("unexpected '") + c + "'");
  }

  RationalPolynomial number() {
    // Exact decimal: digits [. digits] [e [+-] digits]
    std::string digits;
    int frac_digits = 0;
    bool seen_dot = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        if (seen_dot) ++frac_digits;
      } else if (c == '.' && !seen_dot) {
        seen_dot = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits.empty()) fail("malformed number");
    int exponent = 0;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      int sign = 1;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        sign = text_[pos_] == '-' ? -1 : 1;
        ++pos_;
      }
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("malformed exponent");
      exponent = sign * std::stoi(text_.substr(start, pos_ - start));
    }
    Rational value{boost::multiprecision::mpz_int(digits)};
    int shift = exponent - frac_digits;
    Rational ten(10);
    for (int i = 0; i < std::abs(shift); ++i) {
      if (shift > 0) {
        value *= ten;
      } else {
        value /= ten;
      }
    }
    return RationalPolynomial::constant(vars_, value);
  }

  RationalPolynomial name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string id = text_.substr(start, pos_ - start);
    for (int i = 0; i < vars_; ++i) {
      if (names_[i] == id) return RationalPolynomial::variable(vars_, i);
    }
    pos_ = start;
    fail("unknown variable '" + id + "'");
  }

  const std::string& text_;
  const std::vector<std::string>& names_;
  int vars_;
  std::size_t pos_ = 0;
};

}  // namespace

RationalPolynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names) {
  return Parser(text, names).parse();
}

std::vector<std::string> indexed_names(const std::string& prefix, int count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace hyperham
