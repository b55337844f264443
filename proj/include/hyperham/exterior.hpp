#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperham/errors.hpp"
#include "hyperham/polynomial.hpp"
#include "hyperham/rational.hpp"

namespace hyperham {

/// Default largest ambient dimension for form-level computations. Coefficient
/// maps grow like binomial(m, k), so callers building forms from structures
/// check against this cap (4n+1 with n <= 2 fits).
inline constexpr int kDefaultDimensionCap = 12;

inline void check_dimension_cap(int m, int cap = kDefaultDimensionCap) {
  if (m > cap) {
    throw StructuralError("exterior: dimension " + std::to_string(m) + " exceeds cap " +
                          std::to_string(cap));
  }
}

/// Strictly increasing set of axis indices, i.e. the basis form
/// dx^{i1} ^ ... ^ dx^{ik}. Stored as a bit set so ordering is implicit.
class MultiIndex {
 public:
  MultiIndex() = default;

  MultiIndex(std::initializer_list<int> indices) : MultiIndex(std::span<const int>(indices.begin(), indices.size())) {}

  explicit MultiIndex(std::span<const int> indices) {
    int prev = -1;
    for (int i : indices) {
      if (i <= prev) throw StructuralError("multi-index must be strictly increasing");
      if (i >= kMaxVariables) throw StructuralError("multi-index axis out of range");
      bits_ |= 1u << i;
      prev = i;
    }
  }

  static MultiIndex from_bits(std::uint32_t bits) {
    MultiIndex m;
    m.bits_ = bits;
    return m;
  }

  /// All axes 0..m-1 (the volume form's index).
  static MultiIndex full(int m) { return from_bits(m >= 32 ? ~0u : ((1u << m) - 1u)); }

  std::uint32_t bits() const { return bits_; }
  int degree() const { return std::popcount(bits_); }
  bool contains(int i) const { return (bits_ >> i) & 1u; }
  bool disjoint(MultiIndex o) const { return (bits_ & o.bits_) == 0; }

  /// Number of indices strictly below axis i.
  int rank_below(int i) const { return std::popcount(bits_ & ((1u << i) - 1u)); }

  MultiIndex with(int i) const { return from_bits(bits_ | (1u << i)); }
  MultiIndex without(int i) const { return from_bits(bits_ & ~(1u << i)); }
  MultiIndex operator|(MultiIndex o) const { return from_bits(bits_ | o.bits_); }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  int highest() const { return 31 - std::countl_zero(bits_); }

  auto operator<=>(const MultiIndex&) const = default;

  std::string to_string() const {
    if (bits_ == 0) return "1";
    std::string s;
    for (int i : indices()) {
      if (!s.empty()) s += "^";
      s += "dx" + std::to_string(i + 1);
    }
    return s;
  }

 private:
  std::uint32_t bits_ = 0;
};

/// (-1)^(number of pairs (i in a, j in b) with i > j): the sign picked up
/// when sorting dx^a ^ dx^b into increasing order.
inline int wedge_sign(MultiIndex a, MultiIndex b) {
  int swaps = 0;
  for (int j : b.indices()) swaps += std::popcount(a.bits() >> (j + 1));
  return (swaps & 1) ? -1 : 1;
}

template <class C>
using PolynomialField = std::vector<Polynomial<C>>;

/// Exterior k-form on R^m with polynomial coefficients. Values are immutable
/// from the point of view of the free operations below, which all return new
/// forms.
template <class C>
class Form {
 public:
  using Coefficient = Polynomial<C>;
  using TermMap = std::map<MultiIndex, Coefficient>;

  Form(int dimension, int degree) : dimension_(dimension), degree_(degree) {
    if (dimension < 0 || dimension > kMaxVariables) {
      throw StructuralError("form: dimension " + std::to_string(dimension) + " unsupported");
    }
    if (degree < 0) throw StructuralError("form: negative degree");
  }

  static Form scalar(int dimension, const Coefficient& f) {
    Form out(dimension, 0);
    out.add(MultiIndex{}, f);
    return out;
  }

  static Form basis(int dimension, MultiIndex index, const C& c = C(1)) {
    Form out(dimension, index.degree());
    out.add(index, Coefficient::constant(dimension, c));
    return out;
  }

  /// dx^{axis}
  static Form differential(int dimension, int axis) { return basis(dimension, MultiIndex{axis}); }

  static Form volume(int dimension) { return basis(dimension, MultiIndex::full(dimension)); }

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Coefficient coefficient(MultiIndex index) const {
    auto it = terms_.find(index);
    return it == terms_.end() ? Coefficient(dimension_) : it->second;
  }

  void add(MultiIndex index, const Coefficient& c) {
    if (index.degree() != degree_) throw StructuralError("form: term degree mismatch");
    if (degree_ > 0 && index.highest() >= dimension_) throw StructuralError("form: axis beyond dimension");
    if (c.variables() > dimension_) throw StructuralError("form: coefficient has too many variables");
    if (c.is_zero()) return;
    auto it = terms_.find(index);
    if (it == terms_.end()) {
      terms_.emplace(index, c.extended(dimension_));
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Form& operator+=(const Form& o) {
    check_compatible(o);
    for (const auto& [i, c] : o.terms_) add(i, c);
    return *this;
  }

  Form& operator-=(const Form& o) {
    check_compatible(o);
    for (const auto& [i, c] : o.terms_) add(i, -c);
    return *this;
  }

  Form& operator*=(const C& s) {
    if (hyperham::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [i, c] : terms_) c *= s;
    return *this;
  }

  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(Form a) { return a *= C(-1); }
  friend Form operator*(Form a, const C& s) { return a *= s; }
  friend Form operator*(const C& s, Form a) { return a *= s; }

  friend Form operator*(const Coefficient& f, const Form& a) {
    Form out(a.dimension_, a.degree_);
    for (const auto& [i, c] : a.terms_) out.add(i, f * c);
    return out;
  }

  friend bool operator==(const Form& a, const Form& b) {
    return a.dimension_ == b.dimension_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  /// The same form on R^{m'} (m' >= m); new axes are appended after the old ones.
  Form extended(int dimension) const {
    if (dimension < dimension_) throw StructuralError("form: cannot shrink dimension");
    Form out(dimension, degree_);
    for (const auto& [i, c] : terms_) out.add(i, c.extended(dimension));
    return out;
  }

  template <class D>
  Form<D> cast() const {
    Form<D> out(dimension_, degree_);
    for (const auto& [i, c] : terms_) out.add(i, c.template cast<D>());
    return out;
  }

  /// Coefficient values at x, in multi-index order.
  template <class T>
  std::vector<std::pair<MultiIndex, T>> values_at(std::span<const T> x) const {
    std::vector<std::pair<MultiIndex, T>> out;
    out.reserve(terms_.size());
    for (const auto& [i, c] : terms_) out.emplace_back(i, c.template evaluate<T>(x));
    return out;
  }

  /// max_I |a_I(x)|; zero for the zero form.
  template <class T>
  T max_abs_at(std::span<const T> x) const {
    T best(0);
    for (const auto& [i, c] : terms_) {
      T v = abs_value(c.template evaluate<T>(x));
      if (v > best) best = v;
    }
    return best;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [i, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.to_string() + ") " + i.to_string();
    }
    return s;
  }

 private:
  void check_compatible(const Form& o) const {
    if (o.dimension_ != dimension_) throw StructuralError("form: dimension mismatch");
    if (o.degree_ != degree_) throw StructuralError("form: degree mismatch");
  }

  int dimension_;
  int degree_;
  TermMap terms_;
};

using RationalForm = Form<Rational>;

/// Graded-antisymmetric exterior product; zero when deg a + deg b > m.
template <class C>
Form<C> wedge(const Form<C>& a, const Form<C>& b) {
  if (a.dimension() != b.dimension()) throw StructuralError("wedge: dimension mismatch");
  Form<C> out(a.dimension(), a.degree() + b.degree());
  if (a.degree() + b.degree() > a.dimension()) return out;
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      if (!ia.disjoint(ib)) continue;
      Polynomial<C> prod = ca * cb;
      if (wedge_sign(ia, ib) < 0) prod = -prod;
      out.add(ia | ib, prod);
    }
  }
  return out;
}

/// Wedge of `a` with itself `times` times (times >= 1).
template <class C>
Form<C> wedge_power(const Form<C>& a, int times) {
  if (times < 1) throw StructuralError("wedge_power: need at least one factor");
  Form<C> out = a;
  for (int i = 1; i < times; ++i) out = wedge(out, a);
  return out;
}

/// Interior product v _| a. Contracting a 0-form gives the zero 0-form.
template <class C>
Form<C> interior(const PolynomialField<C>& v, const Form<C>& a) {
  if (static_cast<int>(v.size()) != a.dimension()) throw StructuralError("interior: dimension mismatch");
  if (a.degree() == 0) return Form<C>(a.dimension(), 0);
  Form<C> out(a.dimension(), a.degree() - 1);
  for (const auto& [index, c] : a.terms()) {
    for (int axis : index.indices()) {
      if (v[axis].is_zero()) continue;
      Polynomial<C> term = v[axis] * c;
      if (index.rank_below(axis) & 1) term = -term;
      out.add(index.without(axis), term);
    }
  }
  return out;
}

/// Exact exterior derivative of a polynomial-coefficient form.
template <class C>
Form<C> exterior_derivative(const Form<C>& a) {
  Form<C> out(a.dimension(), a.degree() + 1);
  if (a.degree() >= a.dimension()) return out;
  for (const auto& [index, c] : a.terms()) {
    for (int j = 0; j < a.dimension(); ++j) {
      if (index.contains(j)) continue;
      Polynomial<C> dj = c.derivative(j);
      if (dj.is_zero()) continue;
      if (index.rank_below(j) & 1) dj = -dj;
      out.add(index.with(j), dj);
    }
  }
  return out;
}

/// Cartan formula L_v a = d(v _| a) + v _| da.
template <class C>
Form<C> lie_derivative(const PolynomialField<C>& v, const Form<C>& a) {
  Form<C> out = exterior_derivative(interior(v, a));
  Form<C> second = interior(v, exterior_derivative(a));
  if (a.degree() == 0) return second;
  out += second;
  return out;
}

/// Field with constant components.
template <class C>
PolynomialField<C> constant_field(int dimension, std::span<const C> components) {
  if (static_cast<int>(components.size()) != dimension) throw StructuralError("field: wrong component count");
  PolynomialField<C> v;
  v.reserve(dimension);
  for (const C& c : components) v.push_back(Polynomial<C>::constant(dimension, c));
  return v;
}

/// Coordinate field d/dx^{axis}.
template <class C>
PolynomialField<C> coordinate_field(int dimension, int axis) {
  PolynomialField<C> v(dimension, Polynomial<C>(dimension));
  v.at(axis) = Polynomial<C>::constant(dimension, C(1));
  return v;
}

namespace detail {

// Determinant by Gaussian elimination with nonzero pivoting (largest pivot in
// floating point); exact for Rational.
template <class T>
T determinant(std::vector<std::vector<T>> m) {
  const int n = static_cast<int>(m.size());
  T det(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    T best(0);
    for (int r = col; r < n; ++r) {
      T mag = abs_value(m[r][col]);
      if (!hyperham::is_zero(m[r][col]) && (pivot < 0 || mag > best)) {
        pivot = r;
        best = mag;
      }
    }
    if (pivot < 0) return T(0);
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < n; ++r) {
      if (hyperham::is_zero(m[r][col])) continue;
      T f = m[r][col] / m[col][col];
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

}  // namespace detail

/// a_x(v_1, ..., v_k): multilinear and alternating in the vectors.
template <class C, class T>
T evaluate(const Form<C>& a, std::span<const T> x, const std::vector<std::vector<T>>& vectors) {
  const int k = a.degree();
  if (static_cast<int>(vectors.size()) != k) {
    throw StructuralError("evaluate: expected " + std::to_string(k) + " vectors, got " +
                          std::to_string(vectors.size()));
  }
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != a.dimension()) throw StructuralError("evaluate: vector dimension mismatch");
  }
  T sum(0);
  for (const auto& [index, c] : a.terms()) {
    std::vector<int> axes = index.indices();
    std::vector<std::vector<T>> minor(k, std::vector<T>(k));
    for (int r = 0; r < k; ++r) {
      for (int col = 0; col < k; ++col) minor[r][col] = vectors[col][axes[r]];
    }
    sum += c.template evaluate<T>(x) * detail::determinant(std::move(minor));
  }
  return sum;
}

}  // namespace hyperham
