#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hyperham/errors.hpp"
#include "hyperham/rational.hpp"

namespace hyperham {

inline constexpr int kMaxVariables = 24;

/// Exponent vector of a monomial; entries past `variables()` are always zero.
using Exponents = std::array<std::uint8_t, kMaxVariables>;

/// Sparse multivariate polynomial with coefficients in C (Rational or double).
///
/// Zero coefficients are never stored, so `is_zero()` is an exact test and
/// two polynomials compare equal iff their term maps agree.
template <class C>
class Polynomial {
 public:
  using Coefficient = C;
  using TermMap = std::map<Exponents, C>;

  Polynomial() = default;
  explicit Polynomial(int variables) : variables_(variables) {
    if (variables < 0 || variables > kMaxVariables) {
      throw StructuralError("polynomial: variable count " + std::to_string(variables) +
                            " outside [0, " + std::to_string(kMaxVariables) + "]");
    }
  }

  static Polynomial constant(int variables, const C& c) {
    Polynomial p(variables);
    p.add_term(Exponents{}, c);
    return p;
  }

  static Polynomial variable(int variables, int index) {
    Polynomial p(variables);
    p.check_index(index);
    Exponents e{};
    e[index] = 1;
    p.add_term(e, C(1));
    return p;
  }

  static Polynomial monomial(int variables, const Exponents& e, const C& c) {
    Polynomial p(variables);
    p.add_term(e, c);
    return p;
  }

  int variables() const { return variables_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  int total_degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) deg = std::max(deg, degree_of(e));
    return deg;
  }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && degree_of(terms_.begin()->first) == 0);
  }

  C constant_term() const {
    auto it = terms_.find(Exponents{});
    return it == terms_.end() ? C(0) : it->second;
  }

  void add_term(const Exponents& e, const C& c) {
    for (int i = variables_; i < kMaxVariables; ++i) {
      if (e[i] != 0) throw StructuralError("polynomial: exponent on variable out of range");
    }
    if (hyperham::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (hyperham::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    unify(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    unify(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  Polynomial& operator*=(const C& s) {
    if (hyperham::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) {
    for (auto& [e, c] : a.terms_) c = -c;
    return a;
  }
  friend Polynomial operator*(Polynomial a, const C& s) { return a *= s; }
  friend Polynomial operator*(const C& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(std::max(a.variables_, b.variables_));
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e{};
        for (int i = 0; i < kMaxVariables; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  Polynomial derivative(int index) const {
    check_index(index);
    Polynomial out(variables_);
    for (const auto& [e, c] : terms_) {
      if (e[index] == 0) continue;
      Exponents d = e;
      d[index] = static_cast<std::uint8_t>(d[index] - 1);
      out.add_term(d, c * C(static_cast<int>(e[index])));
    }
    return out;
  }

  std::vector<Polynomial> gradient() const {
    std::vector<Polynomial> g;
    g.reserve(variables_);
    for (int i = 0; i < variables_; ++i) g.push_back(derivative(i));
    return g;
  }

  /// Evaluates at `x` (length >= variables()); T is the arithmetic used.
  template <class T>
  T evaluate(std::span<const T> x) const {
    if (static_cast<int>(x.size()) < variables_) {
      throw StructuralError("polynomial: evaluation point has too few coordinates");
    }
    T sum(0);
    for (const auto& [e, c] : terms_) {
      T term = coefficient_cast<T>(c);
      for (int i = 0; i < variables_; ++i) {
        for (int k = 0; k < e[i]; ++k) term *= x[i];
      }
      sum += term;
    }
    return sum;
  }

  template <class T>
  T operator()(const std::vector<T>& x) const {
    return evaluate<T>(std::span<const T>(x));
  }

  /// Same polynomial viewed in a larger variable set (new variables appended).
  Polynomial extended(int variables) const {
    if (variables < variables_) throw StructuralError("polynomial: cannot shrink variable set");
    Polynomial out(variables);
    out.terms_ = terms_;
    return out;
  }

  template <class D>
  Polynomial<D> cast() const {
    Polynomial<D> out(variables_);
    for (const auto& [e, c] : terms_) out.add_term(e, coefficient_cast<D>(c));
    return out;
  }

  /// Substitutes polynomial `subs[i]` for variable i.
  Polynomial compose(const std::vector<Polynomial>& subs) const {
    if (static_cast<int>(subs.size()) != variables_) {
      throw StructuralError("polynomial: compose needs one substitute per variable");
    }
    int out_vars = 0;
    for (const auto& s : subs) out_vars = std::max(out_vars, s.variables());
    Polynomial out(out_vars);
    for (const auto& [e, c] : terms_) {
      Polynomial term = constant(out_vars, c);
      for (int i = 0; i < variables_; ++i) {
        for (int k = 0; k < e[i]; ++k) term = term * subs[i];
      }
      out += term;
    }
    return out;
  }

  std::string to_string(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += coefficient_text(c);
      for (int i = 0; i < variables_; ++i) {
        if (e[i] == 0) continue;
        out += "*" + (i < static_cast<int>(names.size()) ? names[i] : "x" + std::to_string(i + 1));
        if (e[i] > 1) out += "^" + std::to_string(e[i]);
      }
    }
    return out;
  }

  static int degree_of(const Exponents& e) {
    int d = 0;
    for (auto v : e) d += v;
    return d;
  }

 private:
  void check_index(int index) const {
    if (index < 0 || index >= variables_) {
      throw StructuralError("polynomial: variable index " + std::to_string(index) + " out of range");
    }
  }

  void unify(const Polynomial& o) { variables_ = std::max(variables_, o.variables_); }

  static std::string coefficient_text(const C& c) {
    if constexpr (is_rational_v<C>) {
      return c.str();
    } else {
      return std::to_string(c);
    }
  }

  int variables_ = 0;
  TermMap terms_;
};

using RationalPolynomial = Polynomial<Rational>;

/// Parses expressions such as "1/2*x1^2 - 3*x2*x4 + (x3 - 1)^2" over the
/// given variable names. Decimal literals ("0.25", "1e-3") are read exactly.
/// Throws StructuralError with the offending position on malformed input.
RationalPolynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names);

/// Names x1..x{count} (or any prefix) used by the config and CLI layers.
std::vector<std::string> indexed_names(const std::string& prefix, int count);

}  // namespace hyperham
