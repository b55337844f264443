#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hyperham/invariants.hpp"

using namespace hyperham;

namespace {

using RForm = Form<Rational>;
using RField = PolynomialField<Rational>;
using RPoly = Polynomial<Rational>;

ExactStructure exact(int n, const std::string& signs) {
  return standard_structure<Rational>(n, parse_block_signs(signs));
}

RPoly half_norm(int m) {
  RPoly out(m);
  for (int i = 0; i < m; ++i) out += RPoly::variable(m, i) * RPoly::variable(m, i) * Rational(1, 2);
  return out;
}

PolynomialTriple<Rational> triple(const RPoly& a, const RPoly& b, const RPoly& c) { return {a, b, c}; }

PolynomialTriple<Rational> zeros(int m) { return triple(RPoly(m), RPoly(m), RPoly(m)); }

RPoly random_poly(std::mt19937& rng, int m, int max_degree, int terms) {
  std::uniform_int_distribution<int> var(0, m - 1), deg(0, max_degree), coef(-3, 3);
  RPoly out(m);
  for (int k = 0; k < terms; ++k) {
    RPoly mono = RPoly::constant(m, Rational(coef(rng)));
    const int d = deg(rng);
    for (int i = 0; i < d; ++i) mono *= RPoly::variable(m, var(rng));
    out += mono;
  }
  return out;
}

RField linear_field(const MatrixXr& A) {
  const int m = static_cast<int>(A.rows());
  RField v(m, RPoly(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (A(i, j) != 0) v[i] += RPoly::variable(m, j) * Rational(A(i, j));
    }
  }
  return v;
}

MatrixXr K(int a) { return self_dual_generator<Rational>(a); }
MatrixXr Hm(int a) { return anti_self_dual_generator<Rational>(a); }

Eigen::MatrixXd random_symmetric(std::mt19937& rng, int m) {
  std::uniform_int_distribution<int> coef(-4, 4);
  Eigen::MatrixXd D(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) D(i, j) = D(j, i) = coef(rng);
  }
  return D;
}

HamiltonianTriple cubic_triple() {
  auto names = indexed_names("x", 4);
  return HamiltonianTriple::polynomial(
      4, {parse_polynomial("(x1^2 + x2^2 + x3^2 + x4^2)/2 + x1^3/3 - x2*x3*x4", names),
          parse_polynomial("x2^2*x3/2 + x4^3/6", names), parse_polynomial("x1*x3^2/2 - x4*x2^2/4", names)});
}

HamiltonianTriple constant_triple() {
  return HamiltonianTriple::polynomial(4, {RPoly::constant(4, 3), RPoly::constant(4, -1), RPoly::constant(4, 7)});
}

HamiltonianTriple half_norm_triple() {
  return HamiltonianTriple::quadratic(Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Zero(4, 4),
                                      Eigen::MatrixXd::Zero(4, 4));
}

}  // namespace

TEST(Zeta, OneBlockIsOmega) {
  auto s = exact(1, "+");
  auto zeta = build_zeta(s);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(zeta[a], omega(s, a));
}

TEST(Zeta, OneBlockOmegaWedgeZetaIsTwoSOmega) {
  for (const char* signs : {"+", "-"}) {
    auto s = exact(1, signs);
    auto zeta = build_zeta(s);
    for (int a = 0; a < 3; ++a) {
      EXPECT_EQ(wedge(omega(s, a), zeta[a]), RForm::volume(4) * Rational(2 * s.orientation())) << signs;
    }
  }
}

TEST(Zeta, TwoBlocksDegreeSixAndTwentyFourSOmega) {
  for (const char* signs : {"++", "--", "+-", "-+"}) {
    auto s = exact(2, signs);
    auto zeta = build_zeta(s);
    for (int a = 0; a < 3; ++a) {
      EXPECT_EQ(zeta[a].degree(), 6);
      EXPECT_EQ(wedge(omega(s, a), zeta[a]), RForm::volume(8) * Rational(24 * s.orientation())) << signs;
    }
  }
}

TEST(Zeta, CapExceeded) {
  EXPECT_THROW(build_zeta(exact(4, "++++")), StructuralError);
  EXPECT_NO_THROW(build_zeta(exact(4, "++++"), 16));
}

TEST(Theta, ConstantTripleGivesZero) {
  auto s = exact(1, "+");
  auto H = triple(RPoly::constant(4, 5), RPoly::constant(4, -2), RPoly(4));
  EXPECT_TRUE(build_theta(s, H).is_zero());
}

TEST(Theta, HalfNormEqualsInteriorOfK1x) {
  auto s = exact(1, "+");
  RForm theta = build_theta(s, triple(half_norm(4), RPoly(4), RPoly(4)));
  EXPECT_EQ(theta.degree(), 3);
  EXPECT_EQ(theta, field_to_form(linear_field(K(0))));
}

TEST(Theta, ClosedForRandomPolynomialTriples) {
  std::mt19937 rng(7);
  for (const char* signs : {"+", "-"}) {
    auto s = exact(1, signs);
    for (int trial = 0; trial < 20; ++trial) {
      auto H = triple(random_poly(rng, 4, 4, 6), random_poly(rng, 4, 4, 6), random_poly(rng, 4, 4, 6));
      EXPECT_TRUE(exterior_derivative(build_theta(s, H)).is_zero());
    }
  }
  auto s2 = exact(2, "+-");
  auto H = triple(random_poly(rng, 8, 3, 5), random_poly(rng, 8, 3, 5), random_poly(rng, 8, 3, 5));
  EXPECT_TRUE(exterior_derivative(build_theta(s2, H)).is_zero());
}

TEST(FieldForm, CoordinateField) {
  EXPECT_EQ(field_to_form(coordinate_field<Rational>(4, 0)), RForm::basis(4, MultiIndex{1, 2, 3}));
}

TEST(FieldForm, RoundTripRandomFields) {
  std::mt19937 rng(11);
  for (int m : {3, 4, 5}) {
    for (int trial = 0; trial < 10; ++trial) {
      RField v;
      for (int i = 0; i < m; ++i) v.push_back(random_poly(rng, m, 3, 4));
      EXPECT_EQ(form_to_field(field_to_form(v)), v);
    }
  }
}

TEST(FieldForm, WrongDegreeRejected) {
  EXPECT_THROW(form_to_field(RForm::basis(4, MultiIndex{0, 1})), StructuralError);
}

TEST(FieldForm, EquationFieldIsThetaOverFactorial) {
  std::mt19937 rng(3);
  for (const char* signs : {"+", "-"}) {
    auto s = exact(1, signs);
    auto H = triple(random_poly(rng, 4, 3, 5), random_poly(rng, 4, 3, 5), random_poly(rng, 4, 3, 5));
    EXPECT_EQ(form_to_field(build_theta(s, H)), equation_field(s, H));
  }
  for (const char* signs : {"++", "--", "+-"}) {
    auto s = exact(2, signs);
    auto H = triple(random_poly(rng, 8, 3, 4), random_poly(rng, 8, 3, 4), random_poly(rng, 8, 3, 4));
    EXPECT_EQ(form_to_field(build_theta(s, H) * Rational(1, 6)), equation_field(s, H));
  }
}

TEST(FieldForm, EquationFieldIsOrientationTimesHyperfield) {
  std::mt19937 rng(4);
  for (const char* signs : {"+", "-", "++", "--", "+-", "-+"}) {
    const int n = static_cast<int>(std::string(signs).size());
    auto s = exact(n, signs);
    auto H = triple(random_poly(rng, 4 * n, 2, 3), random_poly(rng, 4 * n, 2, 3), random_poly(rng, 4 * n, 2, 3));
    RField X = polynomial_hyperfield(s, H);
    if (s.orientation() < 0) {
      for (auto& c : X) c = -c;
    }
    EXPECT_EQ(equation_field(s, H), X) << signs;
  }
  // s = +1 on positive blocks: the two conventions coincide.
  auto s = exact(1, "+");
  auto H = triple(half_norm(4), RPoly::variable(4, 2), RPoly(4));
  EXPECT_EQ(equation_field(s, H), polynomial_hyperfield(s, H));
}

TEST(Bracket, K1K2GivesMinusTwoK3) {
  RForm chi = field_to_form(linear_field(K(0)));
  RForm psi = field_to_form(linear_field(K(1)));
  MatrixXr minus2K3 = K(2) * Rational(-2);
  EXPECT_EQ(form_to_field(bracket(chi, psi)), linear_field(minus2K3));
  EXPECT_EQ(bracket(chi, psi), field_to_form(linear_field(minus2K3)));
}

TEST(Bracket, SelfBracketVanishes) {
  std::mt19937 rng(5);
  RField v;
  for (int i = 0; i < 4; ++i) v.push_back(random_poly(rng, 4, 3, 4));
  RForm chi = field_to_form(v);
  EXPECT_TRUE(bracket(chi, chi).is_zero());
}

TEST(Bracket, AntisymmetryAndJacobiOnLinearFields) {
  std::vector<RForm> set;
  for (int a = 0; a < 3; ++a) {
    set.push_back(field_to_form(linear_field(K(a))));
    set.push_back(field_to_form(linear_field(Hm(a))));
  }
  MatrixXr D(4, 4);
  D << 1, 0, 0, 1, 0, -1, -1, 0, 0, -1, 1, 0, 1, 0, 0, -1;
  set.push_back(field_to_form(linear_field(MatrixXr(K(0) * D + K(1)))));
  for (const auto& a : set) {
    for (const auto& b : set) {
      EXPECT_EQ(bracket(a, b), -bracket(b, a));
      for (const auto& c : set) {
        RForm j = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
        EXPECT_TRUE(j.is_zero());
      }
    }
  }
}

TEST(Bracket, JacobiOnPolynomialFields) {
  std::mt19937 rng(17);
  std::vector<RForm> set;
  for (int k = 0; k < 3; ++k) {
    RField v;
    for (int i = 0; i < 4; ++i) v.push_back(random_poly(rng, 4, 2, 3));
    set.push_back(field_to_form(v));
  }
  RForm j = bracket(set[0], bracket(set[1], set[2])) + bracket(set[1], bracket(set[2], set[0])) +
            bracket(set[2], bracket(set[0], set[1]));
  EXPECT_TRUE(j.is_zero());
}

TEST(Bracket, ClosureOnConservedForms) {
  // X = K1 x; forms of H-type linear fields commute with it.
  auto s = exact(1, "+");
  RField X = polynomial_hyperfield(s, triple(half_norm(4), RPoly(4), RPoly(4)));
  EXPECT_EQ(X, linear_field(K(0)));
  RForm chi = field_to_form(linear_field(Hm(0)));
  RForm psi = field_to_form(linear_field(Hm(1)));
  ASSERT_TRUE(lie_derivative(X, chi).is_zero());
  ASSERT_TRUE(lie_derivative(X, psi).is_zero());
  RForm b = bracket(chi, psi);
  EXPECT_FALSE(b.is_zero());
  EXPECT_TRUE(lie_derivative(X, b).is_zero());
  // K-type forms are not conserved by K1 x.
  EXPECT_FALSE(lie_derivative(X, field_to_form(linear_field(K(1)))).is_zero());
}

TEST(Phi, SigmaPrimitive) {
  for (const char* signs : {"+", "-", "+-"}) {
    auto s = exact(static_cast<int>(std::string(signs).size()), signs);
    for (int a = 0; a < 3; ++a) EXPECT_EQ(exterior_derivative(sigma(s, a)), omega(s, a));
  }
}

TEST(Phi, OneBlockDPhiIsSixSOmega) {
  for (const char* signs : {"+", "-"}) {
    auto s = exact(1, signs);
    RForm dphi = exterior_derivative(build_phi(s));
    EXPECT_EQ(dphi, RForm::basis(5, MultiIndex{0, 1, 2, 3}) * Rational(6 * s.orientation()));
  }
}

TEST(Phi, TwoBlockDPhiProportionalToVolume) {
  for (const char* signs : {"++", "--"}) {
    auto s = exact(2, signs);
    RForm dphi = exterior_derivative(build_phi(s));
    EXPECT_EQ(dphi, RForm::basis(9, MultiIndex::full(8)) * Rational(72 * s.orientation()));
  }
}

TEST(Phi, MixedSignRejected) {
  try {
    build_phi(exact(2, "+-"));
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_STREQ(e.what(), "mixed-sign structure: s undefined");
  }
  EXPECT_THROW(build_vartheta(exact(2, "-+"), zeros(8)), StructuralError);
}

TEST(Vartheta, ConstantTripleAddsConstantDtTerms) {
  auto s = exact(1, "-");
  auto H = triple(RPoly::constant(4, 2), RPoly::constant(4, -1), RPoly::constant(4, 3));
  RForm diff = build_vartheta(s, H) - build_phi(s);
  EXPECT_FALSE(diff.is_zero());
  for (const auto& [index, c] : diff.terms()) {
    EXPECT_TRUE(index.contains(4));
    EXPECT_TRUE(c.is_constant());
  }
}

TEST(Theorem1, ConstantTripleZero) {
  auto s = standard_structure(1, "+");
  Eigen::VectorXd x(4);
  x << 0.3, -0.1, 0.7, 0.2;
  EXPECT_EQ(theorem1_residual(s, constant_triple(), x, 0.5), 0.0);
  EXPECT_TRUE(theorem1_form(exact(1, "+"), zeros(4)).is_zero());
}

TEST(Theorem1, HalfNormZeroExactly) {
  for (const char* signs : {"+", "-"}) {
    EXPECT_TRUE(theorem1_form(exact(1, signs), triple(half_norm(4), RPoly(4), RPoly(4))).is_zero());
  }
}

TEST(Theorem1, RandomQuadraticTriplesVanishExactly) {
  std::mt19937 rng(2024);
  for (const char* signs : {"+", "-"}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto H = HamiltonianTriple::quadratic(random_symmetric(rng, 4), random_symmetric(rng, 4),
                                            random_symmetric(rng, 4));
      TheoremChecker c(standard_structure(1, signs), H, ResidualMode::Exact);
      EXPECT_TRUE(c.theorem1_vanishes());
      EXPECT_TRUE(c.theorem2_vanishes());
      EXPECT_TRUE(c.theta_closed());
    }
  }
}

TEST(Theorem1, CubicFloatAtHundredPoints) {
  auto opts = SuiteOptions{};
  opts.mode = ResidualMode::Float;
  opts.points = 100;
  opts.seed = 1;
  auto checks = run_theorem_suite(standard_structure(1, "+"), cubic_triple(), opts);
  ASSERT_EQ(checks.size(), 3u);
  for (const auto& c : checks) {
    EXPECT_LE(c.max_residual, 1e-10) << c.check;
    EXPECT_TRUE(c.pass) << c.check;
    EXPECT_EQ(c.points, 100);
  }
}

TEST(Theorem1, CubicExactAlsoVanishes) {
  TheoremChecker c(standard_structure(1, "-"), cubic_triple(), ResidualMode::Exact);
  EXPECT_TRUE(c.theorem1_vanishes());
  EXPECT_TRUE(c.theorem2_vanishes());
}

TEST(Theorem1, TwoBlocksExact) {
  std::mt19937 rng(9);
  auto H = HamiltonianTriple::quadratic(random_symmetric(rng, 8), random_symmetric(rng, 8), random_symmetric(rng, 8));
  for (const char* signs : {"++", "--"}) {
    TheoremChecker c(standard_structure(2, signs), H, ResidualMode::Exact);
    EXPECT_TRUE(c.theorem1_vanishes()) << signs;
    EXPECT_TRUE(c.theorem2_vanishes()) << signs;
  }
}

TEST(Theorem1, MixedRejectedButTheorem2Available) {
  std::mt19937 rng(9);
  auto H = HamiltonianTriple::quadratic(random_symmetric(rng, 8), random_symmetric(rng, 8), random_symmetric(rng, 8));
  TheoremChecker c(standard_structure(2, "+-"), H, ResidualMode::Exact);
  EXPECT_THROW(c.theorem1(Eigen::VectorXd::Zero(8), 0.0), StructuralError);
  EXPECT_EQ(c.theorem2(Eigen::VectorXd::Ones(8)), 0.0);
  EXPECT_TRUE(c.theorem2_vanishes());
}

TEST(Theorem1, ThreeBlocksExceedCap) {
  auto H = HamiltonianTriple::quadratic(Eigen::MatrixXd::Identity(12, 12), Eigen::MatrixXd::Zero(12, 12),
                                        Eigen::MatrixXd::Zero(12, 12));
  EXPECT_THROW(TheoremChecker(standard_structure(3, "+++"), H, ResidualMode::Exact).theorem1(
                   Eigen::VectorXd::Zero(12), 0.0),
               StructuralError);
}

TEST(Theorem1, BrokenFieldDetected) {
  // Z built from the wrong structure must leave a residual.
  auto s = exact(1, "+");
  auto H = triple(half_norm(4), RPoly(4), RPoly(4));
  RForm dv = exterior_derivative(build_vartheta(s, H));
  RForm r = interior(extended_field(polynomial_hyperfield(exact(1, "-"), H)), dv);
  EXPECT_FALSE(r.is_zero());
}

TEST(Theorem1, NegativeOrientationNeedsEquationField) {
  // With s = -1 the sum of per-form fields runs backwards relative to vartheta.
  auto s = exact(1, "-");
  auto H = triple(half_norm(4), RPoly(4), RPoly(4));
  RForm dv = exterior_derivative(build_vartheta(s, H));
  EXPECT_FALSE(interior(extended_field(polynomial_hyperfield(s, H)), dv).is_zero());
  EXPECT_TRUE(interior(extended_field(equation_field(s, H)), dv).is_zero());
}

TEST(Theorem2, ConstantAndHalfNorm) {
  Eigen::VectorXd x(4);
  x << 0.3, -0.1, 0.7, 0.2;
  auto s = standard_structure(1, "+");
  EXPECT_EQ(theorem2_residual(s, constant_triple(), x), 0.0);
  EXPECT_EQ(theorem2_residual(s, half_norm_triple(), x), 0.0);
}

TEST(Theorem2, ResidualFormOfNonConservedFormIsNonzero) {
  // L_X of an unrelated 3-form should not vanish; guards against a trivially zero pipeline.
  auto s = exact(1, "+");
  RField X = polynomial_hyperfield(s, triple(half_norm(4), RPoly(4), RPoly(4)));
  EXPECT_FALSE(lie_derivative(X, RForm::basis(4, MultiIndex{0, 1, 2}) * Rational(1)).is_zero());
}

TEST(Sampled, GenericTripleWithGradients) {
  std::array<ScalarFunction, 3> H{
      [](std::span<const double> x) { return std::cos(x[0]) + x[1] * x[2]; },
      [](std::span<const double> x) { return 0.5 * x[3] * x[3] * x[0]; },
      [](std::span<const double> x) { return std::sin(x[1] - x[2]); },
  };
  std::array<GradientFunction, 3> g{
      [](const Eigen::VectorXd& x) {
        Eigen::VectorXd d(4);
        d << -std::sin(x[0]), x[2], x[1], 0;
        return d;
      },
      [](const Eigen::VectorXd& x) {
        Eigen::VectorXd d(4);
        d << 0.5 * x[3] * x[3], 0, 0, x[3] * x[0];
        return d;
      },
      [](const Eigen::VectorXd& x) {
        Eigen::VectorXd d(4);
        const double c = std::cos(x[1] - x[2]);
        d << 0, c, -c, 0;
        return d;
      },
  };
  for (bool with_gradients : {true, false}) {
    auto triple = with_gradients ? HamiltonianTriple::generic(4, H, g) : HamiltonianTriple::generic(4, H);
    SuiteOptions opts;
    opts.mode = ResidualMode::Sampled;
    opts.points = 10;
    auto checks = run_theorem_suite(standard_structure(1, "-"), triple, opts);
    ASSERT_EQ(checks.size(), 2u);
    EXPECT_LE(checks[0].max_residual, 1e-10) << with_gradients;
    EXPECT_LE(checks[1].max_residual, kSampledResidualTolerance) << with_gradients;
    EXPECT_TRUE(checks[0].pass && checks[1].pass);
  }
}

TEST(Sampled, AgreesWithExactOnCubic) {
  TheoremChecker c(standard_structure(1, "+"), cubic_triple(), ResidualMode::Sampled);
  for (const auto& p : suite_points(4, 5, 3, 1.0)) {
    EXPECT_LE(c.theorem1(p.head(4), p[4]), 1e-12);
    EXPECT_LE(c.theorem2(p.head(4)), 1e-8);
    EXPECT_LE(c.closedness(p.head(4)), 1e-8);
  }
}

TEST(Suite, ExactQuadraticPasses) {
  std::mt19937 rng(1);
  auto H = HamiltonianTriple::quadratic(random_symmetric(rng, 4), random_symmetric(rng, 4), random_symmetric(rng, 4));
  auto checks = run_theorem_suite(standard_structure(1, "+"), H, {});
  ASSERT_EQ(checks.size(), 3u);
  for (const auto& c : checks) {
    EXPECT_EQ(c.max_residual, 0.0);
    EXPECT_EQ(c.tolerance, 0.0);
    EXPECT_TRUE(c.pass);
    EXPECT_EQ(to_string(c.mode), "rational");
  }
}

TEST(Suite, NonPolynomialNeedsSampledMode) {
  std::array<ScalarFunction, 3> H{[](std::span<const double> x) { return std::exp(x[0]); },
                                  [](std::span<const double>) { return 0.0; },
                                  [](std::span<const double>) { return 0.0; }};
  EXPECT_THROW(run_theorem_suite(standard_structure(1, "+"), HamiltonianTriple::generic(4, H), {}),
               UnsupportedError);
}

TEST(Suite, PointsDeterministic) {
  EXPECT_EQ(suite_points(4, 5, 42, 1.0), suite_points(4, 5, 42, 1.0));
  EXPECT_NE(suite_points(4, 5, 42, 1.0), suite_points(4, 5, 43, 1.0));
  EXPECT_THROW(parse_residual_mode("symbolic"), StructuralError);
  EXPECT_EQ(parse_residual_mode("exact"), ResidualMode::Exact);
}
