#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include "hyperham/rational.hpp"

namespace hyperham {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using MatrixXr = Matrix<Rational>;

/// Fixed 4x4 generators of the self-dual (K) and anti-self-dual (H) triples,
/// i.e. the matrices of mu_a and eta_a written as (1/2) J_ij dx^i ^ dx^j with
///   mu_1 = dx1^dx2 + dx3^dx4   eta_1 = dx1^dx3 + dx2^dx4
///   mu_2 = dx1^dx4 + dx2^dx3   eta_2 = dx4^dx1 + dx2^dx3
///   mu_3 = dx1^dx3 + dx4^dx2   eta_3 = dx2^dx1 + dx3^dx4
/// alpha is 0-based.
template <class T>
Matrix<T> self_dual_generator(int alpha);
template <class T>
Matrix<T> anti_self_dual_generator(int alpha);

/// Generator alpha of the block type `sign` (+1 -> K, -1 -> H).
template <class T>
Matrix<T> block_generator(int sign, int alpha);

/// Hypersymplectic structure on R^{4n}: metric g, symplectic matrices J_a and
/// complex structures Y_a = g^{-1} J_a. Immutable after construction.
template <class T>
class BasicStructure {
 public:
  /// Builds from arbitrary J triple and metric; `block_signs` records a
  /// standard block layout when there is one (empty otherwise).
  static BasicStructure from_matrices(std::array<Matrix<T>, 3> J, Matrix<T> metric,
                                      std::vector<int> block_signs = {});

  int n() const { return dimension_ / 4; }
  int dimension() const { return dimension_; }
  const std::vector<int>& block_signs() const { return block_signs_; }
  bool has_block_layout() const { return !block_signs_.empty(); }
  const Matrix<T>& metric() const { return metric_; }
  const Matrix<T>& J(int alpha) const { return J_.at(alpha); }
  const Matrix<T>& Y(int alpha) const { return Y_.at(alpha); }
  bool euclidean() const;

  /// Orientation sign s with (1/(2n)!) w^{2n} = s Omega; for a block layout
  /// this is the product of the block signs, otherwise the sign of Pf(J_1).
  int orientation() const;

  /// The shared block sign when every block has the same type.
  std::optional<int> uniform_type() const;
  bool mixed() const { return has_block_layout() && !uniform_type(); }

  /// Matrix of the vector field map grad H -> X for triple member alpha,
  /// i.e. Y_a g^{-1} (equal to J_a for the euclidean metric).
  Matrix<T> field_map(int alpha) const;

  template <class D>
  BasicStructure<D> cast() const {
    std::array<Matrix<D>, 3> J;
    for (int a = 0; a < 3; ++a) J[a] = J_[a].unaryExpr([](const T& v) { return coefficient_cast<D>(v); });
    Matrix<D> g = metric_.unaryExpr([](const T& v) { return coefficient_cast<D>(v); });
    return BasicStructure<D>::from_matrices(std::move(J), std::move(g), block_signs_);
  }

 private:
  int dimension_ = 0;
  std::vector<int> block_signs_;
  Matrix<T> metric_;
  std::array<Matrix<T>, 3> J_;
  std::array<Matrix<T>, 3> Y_;
};

using Structure = BasicStructure<double>;
using ExactStructure = BasicStructure<Rational>;

/// Block-diagonal structure J_a = L^{s_1}_a (+) ... (+) L^{s_n}_a on R^{4n}
/// with euclidean metric; signs are +1 (K block) or -1 (H block).
template <class T>
BasicStructure<T> standard_structure(int n, const std::vector<int>& block_signs);

/// Same with signs given as a string such as "+-+".
Structure standard_structure(int n, const std::string& signs);
std::vector<int> parse_block_signs(const std::string& signs);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

struct ValidationReport {
  double tolerance = 0.0;
  std::vector<ValidationCheck> checks;

  bool pass() const;
  const ValidationCheck* find(const std::string& name) const;
};

inline constexpr double kDefaultValidationTolerance = 1e-10;

/// Checks every structure invariant; failures are reported, never thrown.
template <class T>
ValidationReport validate(const BasicStructure<T>& s, double tol = kDefaultValidationTolerance);

enum class UnimodularClass { PositiveType, NegativeType, NotUnimodular };

std::string to_string(UnimodularClass c);

/// Type of Y = a.K + b.H on R^4.
UnimodularClass classify_unimodular(const std::array<double, 3>& a, const std::array<double, 3>& b,
                                    double tol = kDefaultValidationTolerance);

/// omega'_a = sum_b R_ab omega_b. Throws StructuralError unless R is a rotation.
template <class T>
BasicStructure<T> rotate_basis(const BasicStructure<T>& s, const Matrix<T>& R,
                               double tol = kDefaultValidationTolerance);

/// Element sum_a c_a omega_a of the quaternionic span; `anti_self_dual` only
/// matters for R^4 classification inputs.
template <class T>
struct QuaternionElement {
  std::array<T, 3> coefficients{};
  std::optional<std::array<T, 3>> anti_self_dual;
};

/// (q1, q2) = a . b on the admissible basis of S.
template <class T>
T scalar_product(const QuaternionElement<T>& q1, const QuaternionElement<T>& q2, const BasicStructure<T>& s);

/// sum_a c_a Y_a
template <class T>
Matrix<T> element_matrix(const QuaternionElement<T>& q, const BasicStructure<T>& s);

/// (4n)^{-1} Tr(Q1^T Q2)
template <class T>
T trace_product(const Matrix<T>& q1, const Matrix<T>& q2);

/// so(4) = su(2)_+ (+) su(2)_- coordinates of an antisymmetric 4x4 matrix.
template <class T>
struct So4Coordinates {
  std::array<T, 3> self_dual{};
  std::array<T, 3> anti_self_dual{};
};

template <class T>
So4Coordinates<T> decompose_so4(const Matrix<T>& A);
template <class T>
Matrix<T> assemble_so4(const So4Coordinates<T>& c);

/// Pfaffian of an antisymmetric matrix (exact for Rational).
template <class T>
T pfaffian(Matrix<T> A);

/// max_ij |A_ij| as double.
template <class T>
double max_abs(const Matrix<T>& A);

}  // namespace hyperham
