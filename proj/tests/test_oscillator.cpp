#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hyperham/errors.hpp"
#include "hyperham/oscillator.hpp"

using namespace hyperham;

namespace {

constexpr double kPi = std::numbers::pi;

HamiltonianTriple radial_triple(int blocks, const std::array<const char*, 3>& text) {
  auto names = indexed_names("rho", blocks);
  return HamiltonianTriple::radial_polynomial(
      blocks, {parse_polynomial(text[0], names), parse_polynomial(text[1], names), parse_polynomial(text[2], names)});
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

}  // namespace

TEST(Solve, LinearRadial) {
  auto s = standard_structure(1, "+");
  auto sol = solve(s, radial_triple(1, {"rho1", "0", "0"}), vec({1, 0, 0, 0}));
  EXPECT_EQ(sol.c[0], (std::array<double, 3>{1, 0, 0}));
  EXPECT_EQ(sol.nu[0], 1.0);
  EXPECT_EQ(Eigen::MatrixXd(sol.L[0]), s.J(0));
}

TEST(Solve, QuadraticRadial) {
  auto sol = solve(standard_structure(1, "+"), radial_triple(1, {"rho1^2/2", "0", "0"}), vec({1, 1, 0, 0}));
  EXPECT_EQ(sol.b[0], 1.0);
  EXPECT_EQ(sol.nu[0], 1.0);
}

TEST(Solve, PerBlockFrequencies) {
  auto sol = solve(standard_structure(2, "++"), radial_triple(2, {"rho1 + 2*rho2", "0", "0"}),
                   vec({1, 0, 0, 0, 0, 1, 0, 0}));
  EXPECT_EQ(sol.nu[0], 1.0);
  EXPECT_EQ(sol.nu[1], 2.0);
}

TEST(Solve, RejectsNonRadial) {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  EXPECT_THROW(solve(standard_structure(1, "+"), HamiltonianTriple::quadratic(I, I, I), vec({1, 0, 0, 0})),
               StructuralError);
}

TEST(Solve, GeneratorsAreComplexStructures) {
  auto sol = solve(standard_structure(2, "+-"), radial_triple(2, {"rho1*rho2", "rho2^2 - rho1", "3*rho1"}),
                   vec({0.3, 0.1, -0.7, 0.2, 1.1, 0.4, 0, -0.5}));
  for (int p = 0; p < 2; ++p) {
    ASSERT_GT(sol.nu[p], 0.0);
    EXPECT_LE((sol.L[p] * sol.L[p] + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((sol.L[p] + sol.L[p].transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Solve, FrequenciesCoupleAcrossBlocks) {
  auto s = standard_structure(2, "++");
  auto H = radial_triple(2, {"rho1*rho2", "0", "0"});
  auto small = solve(s, H, vec({1, 0, 0, 0, 1, 0, 0, 0}));
  auto large = solve(s, H, vec({1, 0, 0, 0, 2, 0, 0, 0}));
  EXPECT_EQ(small.nu[0], 0.5);
  EXPECT_EQ(large.nu[0], 2.0);
}

TEST(EvaluateAt, Examples) {
  auto s = standard_structure(1, "+");
  auto sol = solve(s, radial_triple(1, {"rho1", "0", "0"}), vec({1, 0, 0, 0}));
  EXPECT_EQ(evaluate_at(sol, 0.0), sol.x0);
  EXPECT_LE((evaluate_at(sol, kPi / 2) - vec({0, -1, 0, 0})).norm(), 1e-15);
  EXPECT_LE((evaluate_at(sol, 2 * kPi / sol.nu[0]) - sol.x0).norm(), 1e-15);
}

TEST(EvaluateAt, NormConservedPerBlock) {
  auto sol = solve(standard_structure(2, "+-"), radial_triple(2, {"rho1*rho2", "rho2^2", "rho1"}),
                   vec({0.3, 0.1, -0.7, 0.2, 1.1, 0.4, 0, -0.5}));
  for (double t : {0.1, 1.0, 17.3, 250.0}) {
    Eigen::VectorXd x = evaluate_at(sol, t);
    for (int p = 0; p < 2; ++p) EXPECT_NEAR(x.segment<4>(4 * p).norm(), sol.xi0(p).norm(), 1e-14);
  }
}

TEST(EvaluateAt, FrozenBlockStays) {
  auto sol = solve(standard_structure(2, "++"), radial_triple(2, {"rho1", "0", "0"}),
                   vec({1, 0, 0, 0, 0.5, 0.5, 0, 0}));
  EXPECT_TRUE(sol.frozen(1));
  EXPECT_EQ(evaluate_at(sol, 3.0).segment<4>(4), sol.xi0(1));
}

TEST(GreatCircle, ClosedFormAndIntegrated) {
  auto s = standard_structure(1, "+");
  auto H = radial_triple(1, {"rho1^2/2", "0", "0"});
  auto sol = solve(s, H, vec({1, 1, 0, 0}));
  auto closed = sample(sol, 10.0, 1e-3);
  EXPECT_LE(great_circle_residual(sol, closed.states), 1e-9);
  IntegratorSettings set;
  set.step = 1e-3;
  set.t_end = 10.0;
  auto traj = integrate(hyperfield(s, H), sol.x0, set);
  EXPECT_LE(great_circle_residual(sol, traj.states), 1e-8);
}

TEST(GreatCircle, PerturbedHamiltonianLeavesCircle) {
  auto s = standard_structure(1, "+");
  auto H = radial_triple(1, {"rho1^2/2", "0", "0"});
  auto sol = solve(s, H, vec({1, 1, 0, 0}));
  auto names = indexed_names("x", 4);
  auto perturbed = HamiltonianTriple::polynomial(
      4, {parse_polynomial("((x1^2 + x2^2 + x3^2 + x4^2)/2)^2/2", names), parse_polynomial("0", names),
          parse_polynomial("x1*x2/10", names)});
  IntegratorSettings set;
  set.step = 1e-3;
  set.t_end = 5.0;
  auto traj = integrate(hyperfield(s, perturbed), sol.x0, set);
  EXPECT_GT(great_circle_residual(sol, traj.states), 1e-3);
}

TEST(GreatCircle, ZeroBlockIsZero) {
  auto sol = solve(standard_structure(1, "+"), radial_triple(1, {"rho1", "0", "0"}), vec({0, 0, 0, 0}));
  EXPECT_EQ(great_circle_residual(sol, std::vector<double>{0.0, 1.0}), 0.0);
}

TEST(Period, RecoveredFromSamples) {
  auto s = standard_structure(1, "+");
  auto H = radial_triple(1, {"rho1^2/2", "rho1/2", "0"});
  auto sol = solve(s, H, vec({1, 1, 0, 0}));
  const double expected = 2 * kPi / sol.nu[0];
  auto closed = sample(sol, 1.2 * expected, 1e-3);
  EXPECT_LE(std::abs(measure_period(sol, 0, closed.times, closed.states) - expected), 1e-6);
  IntegratorSettings set;
  set.t_end = 1.2 * expected;
  auto traj = integrate(hyperfield(s, H), sol.x0, set);
  EXPECT_LE(std::abs(measure_period(sol, 0, traj.times, traj.states) - expected), 1e-6);
  auto short_run = sample(sol, 0.5 * expected, 1e-3);
  EXPECT_THROW(measure_period(sol, 0, short_run.times, short_run.states), StructuralError);
}

TEST(Convergents, SqrtTwo) {
  auto cf = convergents(std::sqrt(2.0), 1000000);
  ASSERT_GE(cf.size(), 5u);
  EXPECT_EQ(cf[0], (std::pair<long, long>{1, 1}));
  EXPECT_EQ(cf[1], (std::pair<long, long>{3, 2}));
  EXPECT_EQ(cf[2], (std::pair<long, long>{7, 5}));
  EXPECT_LE(cf.back().second, 1000000);
  EXPECT_FALSE(numerically_rational(std::sqrt(2.0), 1e-9, 1000000));
  EXPECT_TRUE(numerically_rational(0.5, 1e-9, 1000000));
  EXPECT_TRUE(numerically_rational(355.0 / 113.0, 1e-9, 1000000));
}

TEST(ClassifyOrbit, SingleBlockIsCircle) {
  auto sol = solve(standard_structure(1, "-"), radial_triple(1, {"rho1^2/2", "rho1", "0"}), vec({0.2, 1, 0, 0}));
  auto orbit = classify_orbit(sol);
  EXPECT_EQ(orbit.m, 1);
  EXPECT_EQ(orbit.k, 1);
  EXPECT_EQ(orbit.closure, "circle");
  EXPECT_NE(orbit.label().find("numerically rational at"), std::string::npos);
}

TEST(ClassifyOrbit, ResonantPairCloses) {
  auto sol = solve(standard_structure(2, "++"), radial_triple(2, {"rho1 + 2*rho2", "0", "0"}),
                   vec({1, 0, 0, 0, 0, 1, 0, 0}));
  auto orbit = classify_orbit(sol);
  EXPECT_EQ(orbit.m, 2);
  EXPECT_EQ(orbit.k, 1);
  EXPECT_TRUE(orbit.closed());
  EXPECT_LE((evaluate_at(sol, 2 * kPi) - sol.x0).norm(), 1e-9);
}

TEST(ClassifyOrbit, IrrationalPairIsTorus) {
  const double r2 = std::sqrt(2.0);
  RadialFunction h1{[r2](const Eigen::VectorXd& rho) { return rho[0] + r2 * rho[1]; },
                    [r2](const Eigen::VectorXd&) { return Eigen::Vector2d(1.0, r2).eval(); },
                    {}};
  RadialFunction zero{[](const Eigen::VectorXd&) { return 0.0; },
                      [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2).eval(); },
                      {}};
  auto sol = solve(standard_structure(2, "+-"), HamiltonianTriple::radial(2, {h1, zero, zero}),
                   vec({1, 0, 0, 0, 0, 1, 0, 0}));
  auto orbit = classify_orbit(sol, 1e-9, 1000000);
  EXPECT_EQ(orbit.m, 2);
  EXPECT_EQ(orbit.k, 2);
  EXPECT_EQ(orbit.closure, "T^2");
  EXPECT_FALSE(orbit.closed());
}

TEST(ClassifyOrbit, UnexcitedBlocksReduceManifold) {
  auto sol = solve(standard_structure(3, "+++"), radial_triple(3, {"rho1 + 2*rho2 + 3*rho3", "0", "0"}),
                   vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0}));
  auto orbit = classify_orbit(sol);
  EXPECT_EQ(orbit.m, 2);
  EXPECT_EQ(orbit.manifold, "V^2");
  auto still = classify_orbit(solve(standard_structure(1, "+"), radial_triple(1, {"rho1", "0", "0"}),
                                    vec({0, 0, 0, 0})));
  EXPECT_EQ(still.m, 0);
  EXPECT_EQ(still.k, 0);
  EXPECT_EQ(still.closure, "point");
}

TEST(HarmonicPair, Energies) {
  EXPECT_EQ(harmonic_pair_energies(vec({1, 0, 0, 0})), (std::pair<double, double>{0.5, 0.0}));
  EXPECT_EQ(harmonic_pair_energies(vec({1, 0, 1, 0})), (std::pair<double, double>{0.5, 0.5}));
  EXPECT_THROW(harmonic_pair_energies(vec({1, 0})), StructuralError);
}

TEST(HarmonicPair, ConservedAlongClosedForm) {
  auto sol = solve(standard_structure(1, "+"), radial_triple(1, {"rho1", "0", "0"}), vec({0.3, -1.2, 0.8, 0.5}));
  auto [ea0, eb0] = harmonic_pair_energies(sol.x0);
  for (double t = 0.0; t < 50.0; t += 0.37) {
    auto [ea, eb] = harmonic_pair_energies(evaluate_at(sol, t));
    EXPECT_NEAR(ea, ea0, 1e-10);
    EXPECT_NEAR(eb, eb0, 1e-10);
  }
}
