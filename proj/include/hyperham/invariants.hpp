#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperham/exterior.hpp"
#include "hyperham/fields.hpp"
#include "hyperham/structures.hpp"

namespace hyperham {

template <class C>
using PolynomialTriple = std::array<Polynomial<C>, 3>;

/// omega_a = (1/2) (J_a)_ij dx^i ^ dx^j on R^{4n}.
template <class C>
Form<C> omega(const BasicStructure<C>& s, int alpha);

/// zeta_a = omega_a^(2n-1); zeta_a = omega_a for n = 1.
template <class C>
std::array<Form<C>, 3> build_zeta(const BasicStructure<C>& s, int cap = kDefaultDimensionCap);

/// X^i = sum_a (Y_a g^{-1})_ij d_j H^a with polynomial components.
template <class C>
PolynomialField<C> polynomial_hyperfield(const BasicStructure<C>& s, const PolynomialTriple<C>& H);

/// The field fixed by X _| Omega = Theta / (2n-1)!. This is s times
/// polynomial_hyperfield: the two agree only when s = +1.
template <class C>
PolynomialField<C> equation_field(const BasicStructure<C>& s, const PolynomialTriple<C>& H);

/// Theta = sum_a dH^a ^ zeta_a, degree 4n-1.
template <class C>
Form<C> build_theta(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap = kDefaultDimensionCap);

/// X _| Omega.
template <class C>
Form<C> field_to_form(const PolynomialField<C>& X);

/// Inverse of field_to_form: X^i = (-1)^i chi_{[m] \ i} (0-based i).
template <class C>
PolynomialField<C> form_to_field(const Form<C>& chi);

/// [v, w]^i = v^j d_j w^i - w^j d_j v^i
template <class C>
PolynomialField<C> commutator(const PolynomialField<C>& v, const PolynomialField<C>& w);

/// {chi, psi} = F([F^{-1} chi, F^{-1} psi]) with F = field_to_form.
template <class C>
Form<C> bracket(const Form<C>& chi, const Form<C>& psi);

/// sigma_a = (1/2) (J_a)_ij x^i dx^j on R^{4n}, so d sigma_a = omega_a.
template <class C>
Form<C> sigma(const BasicStructure<C>& s, int alpha);

/// phi = sum_a sigma_a ^ zeta_a on R^{4n+1} (last axis t). Rejects mixed
/// block layouts, where s is undefined.
template <class C>
Form<C> build_phi(const BasicStructure<C>& s, int cap = kDefaultDimensionCap);

/// vartheta = phi + 6 s n sum_a H^a zeta_a ^ dt on R^{4n+1}.
template <class C>
Form<C> build_vartheta(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap = kDefaultDimensionCap);

/// Z = d/dt + X on R^{4n+1}.
template <class C>
PolynomialField<C> extended_field(const PolynomialField<C>& X);

/// Z _| d vartheta as a form on R^{4n+1}, Z = d/dt + equation_field.
template <class C>
Form<C> theorem1_form(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap = kDefaultDimensionCap);

/// L_X Theta on R^{4n}.
template <class C>
Form<C> theorem2_form(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap = kDefaultDimensionCap);

/// Rational coefficients of a triple, cast as needed. Throws UnsupportedError
/// for non-polynomial kinds.
template <class C>
PolynomialTriple<C> polynomial_triple(const HamiltonianTriple& H);

enum class ResidualMode { Exact, Float, Sampled };

std::string to_string(ResidualMode mode);
/// "rational"/"exact", "float", "sampled".
ResidualMode parse_residual_mode(const std::string& text);

inline constexpr double kFloatResidualTolerance = 1e-10;
/// Sampled L_X Theta stacks two finite-difference layers.
inline constexpr double kSampledResidualTolerance = 1e-6;

double default_residual_tolerance(ResidualMode mode);

/// Residual forms for one (S, H) pair, built once and evaluated at many points.
/// Exact and Float need a polynomial triple; Sampled works for any kind.
class TheoremChecker {
 public:
  TheoremChecker(const Structure& s, const HamiltonianTriple& H, ResidualMode mode,
                 int cap = kDefaultDimensionCap);
  ~TheoremChecker();
  TheoremChecker(TheoremChecker&&) noexcept;
  TheoremChecker& operator=(TheoremChecker&&) noexcept;

  ResidualMode mode() const { return mode_; }
  int dimension() const { return dimension_; }

  /// max |coefficient| of Z _| d vartheta at (x, t).
  double theorem1(const Eigen::VectorXd& x, double t) const;
  /// max |coefficient| of L_X Theta at x.
  double theorem2(const Eigen::VectorXd& x) const;
  /// max |coefficient| of d Theta at x.
  double closedness(const Eigen::VectorXd& x) const;

  /// Symbolic identities (Exact and Float only; false in Sampled mode).
  bool theorem1_vanishes() const;
  bool theorem2_vanishes() const;
  bool theta_closed() const;

 private:
  struct Impl;
  ResidualMode mode_;
  int dimension_;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrappers; each call rebuilds the residual forms.
double theorem1_residual(const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x, double t,
                         ResidualMode mode = ResidualMode::Exact);
double theorem2_residual(const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x,
                         ResidualMode mode = ResidualMode::Exact);

struct ResidualCheck {
  std::string check;  // "theorem1", "theorem2", "dTheta"
  ResidualMode mode = ResidualMode::Exact;
  int points = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteOptions {
  ResidualMode mode = ResidualMode::Exact;
  int points = 100;
  std::uint64_t seed = 0;
  /// Negative selects default_residual_tolerance(mode); exact mode demands 0.
  double tolerance = -1.0;
  /// Points are drawn uniformly from [-box, box]^{4n}, t from [0, box].
  double box = 1.0;
  int cap = kDefaultDimensionCap;
  bool theorem1 = true;
  bool theorem2 = true;
};

/// theorem1, theorem2 and (except in Sampled mode) d Theta = 0 at seeded
/// points, in that order; disabled theorems are left out.
std::vector<ResidualCheck> run_theorem_suite(const Structure& s, const HamiltonianTriple& H,
                                             const SuiteOptions& options = {});

/// Same random points run_theorem_suite uses (x in the first rows, t last).
std::vector<Eigen::VectorXd> suite_points(int dimension, int count, std::uint64_t seed, double box);

}  // namespace hyperham
