#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hyperham/polynomial.hpp"
#include "hyperham/sampled_form.hpp"
#include "hyperham/structures.hpp"

namespace hyperham {

using GradientFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct FiniteDifferenceOptions {
  double step = 1e-6;
  /// Combine steps h and h/2 to cancel the leading truncation term.
  bool richardson = false;
};

/// H^a = (1/2) x^T D^a x
struct QuadraticHamiltonians {
  std::array<Eigen::MatrixXd, 3> D;
};

/// A smooth function of the block radii rho_p = |xi_p|^2 / 2 together with
/// its exact partials A_p = dH/drho_p. Second partials are optional; when
/// absent they are taken by central differences of `partials`.
struct RadialFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> partials;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> second_partials;
};

struct RadialHamiltonians {
  int blocks = 0;
  std::array<RadialFunction, 3> H;
  /// Set when the functions are polynomials in (rho_1, ..., rho_n).
  std::optional<std::array<RationalPolynomial, 3>> polynomials;
};

struct PolynomialHamiltonians {
  std::array<RationalPolynomial, 3> H;
  std::array<Polynomial<double>, 3> values;
  std::array<std::vector<Polynomial<double>>, 3> gradients;
};

struct GenericHamiltonians {
  std::array<ScalarFunction, 3> H;
  /// Empty entries fall back to central differences.
  std::array<GradientFunction, 3> gradients;
};

enum class HamiltonianKind { Quadratic, Radial, Polynomial, Generic };

std::string to_string(HamiltonianKind kind);

/// Three scalar fields H^1, H^2, H^3 on R^dim with gradient oracles.
class HamiltonianTriple {
 public:
  static HamiltonianTriple quadratic(const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2,
                                     const Eigen::MatrixXd& D3);
  /// Runs a finite-difference consistency check of partials against values.
  static HamiltonianTriple radial(int blocks, std::array<RadialFunction, 3> H);
  /// Polynomials in the variables rho_1..rho_blocks.
  static HamiltonianTriple radial_polynomial(int blocks, const std::array<RationalPolynomial, 3>& H);
  static HamiltonianTriple polynomial(int dimension, const std::array<RationalPolynomial, 3>& H);
  static HamiltonianTriple generic(int dimension, std::array<ScalarFunction, 3> H,
                                   std::array<GradientFunction, 3> gradients = {});

  HamiltonianKind kind() const;
  int dimension() const { return dimension_; }

  double value(int alpha, const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(int alpha, const Eigen::VectorXd& x, const FiniteDifferenceOptions& fd = {}) const;
  Eigen::MatrixXd hessian(int alpha, const Eigen::VectorXd& x, const FiniteDifferenceOptions& fd = {}) const;

  /// True unless a Generic member lacks a gradient callable.
  bool exact_gradients() const;

  /// Exact polynomial form in x (Quadratic, Polynomial and polynomial Radial kinds).
  std::optional<std::array<RationalPolynomial, 3>> polynomials() const;

  const QuadraticHamiltonians* quadratic_data() const { return std::get_if<QuadraticHamiltonians>(&data_); }
  const RadialHamiltonians* radial_data() const { return std::get_if<RadialHamiltonians>(&data_); }

 private:
  using Data = std::variant<QuadraticHamiltonians, RadialHamiltonians, PolynomialHamiltonians, GenericHamiltonians>;
  HamiltonianTriple(int dimension, Data data) : dimension_(dimension), data_(std::move(data)) {}

  int dimension_;
  Data data_;
};

/// rho_p = |xi_p|^2 / 2 for each 4-block of x.
Eigen::VectorXd block_radii(const Eigen::VectorXd& x);

/// Vector field x -> f(x) with an optional Jacobian map.
class VectorField {
 public:
  using Map = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using JacobianMap = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  VectorField(int dimension, Map f, JacobianMap jacobian = {}, bool exact_jacobian = false);

  static VectorField linear(const Eigen::MatrixXd& A);
  static VectorField zero(int dimension);

  int dimension() const { return dimension_; }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  /// Df(x): the attached map if present, otherwise central differences.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, double step = 1e-6) const;
  bool has_jacobian() const { return static_cast<bool>(jacobian_); }
  bool exact_jacobian() const { return exact_jacobian_; }

 private:
  int dimension_;
  Map f_;
  JacobianMap jacobian_;
  bool exact_jacobian_;
};

/// f(x) = sum_a Y_a g^{-1} grad H^a(x).
VectorField hyperfield(const Structure& s, const HamiltonianTriple& H, const FiniteDifferenceOptions& fd = {});

/// Tr Df(x).
double divergence(const VectorField& X, const Eigen::VectorXd& x);

/// A with f(x) = A x for a quadratic triple: A = sum_a Y_a g^{-1} D^a.
Eigen::MatrixXd linearize(const Structure& s, const HamiltonianTriple& H);

struct OddPowerTrace {
  int k = 0;           // power 2k+1
  double trace = 0.0;  // Tr(A^{2k+1})
};

/// Outcome of the odd-power trace test. NonHamiltonian proves the linear field
/// Ax is Hamiltonian for no symplectic structure; Inconclusive proves nothing.
struct HamiltonianityCertificate {
  enum class Verdict { NonHamiltonian, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  int k = -1;
  double trace_value = 0.0;
  int k_max = 0;
  double tolerance = 0.0;
  std::vector<OddPowerTrace> traces;

  bool non_hamiltonian() const { return verdict == Verdict::NonHamiltonian; }
  std::string summary() const;
};

inline constexpr double kDefaultCertificateTolerance = 1e-9;

/// Smallest k in [0, k_max] with |Tr(A^{2k+1})| > tol * |A|_F^{2k+1}.
/// k_max <= 0 selects 2 * dim. Traces of odd powers beyond the dimension are
/// determined by the lower ones (Newton identities), so larger k_max adds cost
/// but no information.
HamiltonianityCertificate hamiltonianity_certificate(const Eigen::MatrixXd& A, int k_max = 0,
                                                     double tol = kDefaultCertificateTolerance);

/// Tr(A^{2k+1}) in exact arithmetic.
Rational odd_power_trace(const MatrixXr& A, int k);

}  // namespace hyperham
