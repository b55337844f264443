#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "hyperham/integrate.hpp"
#include "hyperham/oscillator.hpp"

using namespace hyperham;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXd tracefree_matrix() {
  Eigen::MatrixXd D1(4, 4);
  D1 << 1, 0, 0, 1, 0, -1, -1, 0, 0, -1, 1, 0, 1, 0, 0, -1;
  return linearize(standard_structure(1, "+"),
                   HamiltonianTriple::quadratic(D1, Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Zero(4, 4)));
}

HamiltonianTriple radial_triple(int blocks, const std::array<const char*, 3>& text) {
  auto names = indexed_names("rho", blocks);
  return HamiltonianTriple::radial_polynomial(
      blocks, {parse_polynomial(text[0], names), parse_polynomial(text[1], names), parse_polynomial(text[2], names)});
}

IntegratorSettings rk4(double h, double t_end) {
  IntegratorSettings s;
  s.step = h;
  s.t_end = t_end;
  return s;
}

Eigen::Vector4d e1() { return Eigen::Vector4d(1, 0, 0, 0); }

}  // namespace

TEST(Integrate, ZeroFieldIsConstant) {
  Eigen::VectorXd x0(4);
  x0 << 0.1, 2, -3, 4;
  auto traj = integrate(VectorField::zero(4), x0, rk4(0.1, 1.0));
  ASSERT_EQ(traj.size(), 11u);
  for (const auto& x : traj.states) EXPECT_EQ(x, x0);
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
}

TEST(Integrate, K1RotationReturnsAfterFullTurn) {
  auto traj = integrate(VectorField::linear(self_dual_generator<double>(0)), e1(), rk4(1e-3, kTwoPi));
  EXPECT_LE((traj.states.back() - Eigen::VectorXd(e1())).norm(), 1e-9);
  EXPECT_DOUBLE_EQ(traj.times.back(), kTwoPi);
  for (std::size_t i = 1; i < traj.size(); ++i) EXPECT_LT(traj.times[i - 1], traj.times[i]);
}

TEST(Integrate, RadialMatchesClosedForm) {
  auto s = standard_structure(1, "+");
  auto H = radial_triple(1, {"rho1^2/2", "0", "0"});
  Eigen::VectorXd x0(4);
  x0 << 1, 1, 0, 0;
  auto traj = integrate(hyperfield(s, H), x0, rk4(1e-3, 10.0));
  auto sol = solve(s, H, x0);
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    worst = std::max(worst, (traj.states[i] - evaluate_at(sol, traj.times[i])).norm());
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Integrate, FourthOrderConvergence) {
  auto X = VectorField::linear(self_dual_generator<double>(0));
  std::vector<double> errors;
  for (double h : {1e-1, 5e-2, 2.5e-2}) {
    auto traj = integrate(X, e1(), rk4(h, 10.0));
    Eigen::VectorXd exact(4);
    exact << std::cos(10.0), -std::sin(10.0), 0, 0;
    errors.push_back((traj.states.back() - exact).norm());
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double order = std::log2(errors[i - 1] / errors[i]);
    EXPECT_GE(order, 3.7);
    EXPECT_LE(order, 4.3);
  }
}

TEST(Integrate, Deterministic) {
  auto X = VectorField::linear(tracefree_matrix());
  Eigen::VectorXd x0(4);
  x0 << 0.2, 0.1, -0.3, 0.4;
  IntegratorSettings s = rk4(1e-2, 3.0);
  std::ostringstream a, b;
  write_csv(a, integrate(X, x0, s));
  write_csv(b, integrate(X, x0, s));
  EXPECT_EQ(a.str(), b.str());
  s.method = IntegratorMethod::RK45;
  std::ostringstream c, d;
  write_csv(c, integrate(X, x0, s));
  write_csv(d, integrate(X, x0, s));
  EXPECT_EQ(c.str(), d.str());
}

TEST(Integrate, Stride) {
  IntegratorSettings s = rk4(0.1, 1.05);
  s.stride = 3;
  auto traj = integrate(VectorField::zero(4), e1(), s);
  std::vector<double> expected{0.0, 0.30000000000000004, 0.6000000000000001, 0.9, 1.05};
  ASSERT_EQ(traj.times.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(traj.times[i], expected[i], 1e-15);
}

TEST(Integrate, AdaptiveMatchesExact) {
  IntegratorSettings s = rk4(1e-2, 10.0);
  s.method = IntegratorMethod::RK45;
  auto traj = integrate(VectorField::linear(self_dual_generator<double>(0)), e1(), s);
  Eigen::VectorXd exact(4);
  exact << std::cos(10.0), -std::sin(10.0), 0, 0;
  EXPECT_LE((traj.states.back() - exact).norm(), 1e-8);
  EXPECT_DOUBLE_EQ(traj.times.back(), 10.0);
}

TEST(Integrate, StepFloorReportsLastGoodTime) {
  // x' = x^2 from x = 1 blows up at t = 1.
  VectorField blowup(1, [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseProduct(x); });
  IntegratorSettings s = rk4(1e-3, 2.0);
  s.method = IntegratorMethod::RK45;
  s.min_step = 1e-9;
  try {
    integrate(blowup, Eigen::VectorXd::Ones(1), s);
    FAIL() << "expected TrajectoryError";
  } catch (const TrajectoryError& e) {
    EXPECT_GT(e.last_good_time(), 0.9);
    EXPECT_LT(e.last_good_time(), 1.0);
    EXPECT_FALSE(e.partial().times.empty());
    EXPECT_LE(e.partial().times.back(), e.last_good_time());
  }
}

TEST(Integrate, NonFiniteStateReported) {
  VectorField blowup(1, [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseProduct(x); });
  EXPECT_THROW(integrate(blowup, Eigen::VectorXd::Ones(1), rk4(0.5, 5.0)), TrajectoryError);
}

TEST(Integrate, SettingsValidated) {
  EXPECT_THROW(integrate(VectorField::zero(4), e1(), rk4(0.0, 1.0)), StructuralError);
  EXPECT_THROW(integrate(VectorField::zero(4), e1(), rk4(0.1, -1.0)), StructuralError);
  EXPECT_THROW(integrate(VectorField::zero(4), Eigen::VectorXd::Zero(3), rk4(0.1, 1.0)), StructuralError);
  EXPECT_THROW(parse_integrator_method("euler"), StructuralError);
}

TEST(FlowJacobian, ZeroFieldIdentity) {
  auto traj = flow_jacobian(VectorField::zero(4), e1(), rk4(0.1, 1.0));
  for (const auto& J : traj.jacobians) EXPECT_EQ(J, Eigen::MatrixXd::Identity(4, 4));
}

TEST(FlowJacobian, LinearFieldIsMatrixExponential) {
  Eigen::MatrixXd A = tracefree_matrix();
  auto traj = flow_jacobian(VectorField::linear(A), e1(), rk4(1e-3, 5.0));
  Eigen::MatrixXd expected = (A * 5.0).exp();
  EXPECT_LE((traj.jacobians.back() - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff(), 1e-9);
  monitor_det_jacobian(traj);
  EXPECT_LE(std::abs(traj.monitor("detJ")->back() - 1.0), 1e-6);
}

TEST(FlowJacobian, CubicTripleVolumePreserving) {
  auto names = indexed_names("x", 4);
  auto H = HamiltonianTriple::polynomial(
      4, {parse_polynomial("(x1^2 + x2^2 + x3^2 + x4^2)/2 + x1^3/3 - x2*x3*x4", names),
          parse_polynomial("x2^2*x3/2 + x4^3/6", names), parse_polynomial("x1*x3^2/2 - x4*x2^2/4", names)});
  Eigen::VectorXd x0(4);
  x0 << 0.3, -0.2, 0.25, 0.1;
  auto traj = flow_jacobian(hyperfield(standard_structure(1, "+"), H), x0, rk4(1e-3, 5.0));
  monitor_det_jacobian(traj);
  EXPECT_LE(traj.max_drift("detJ"), 1e-6);
}

TEST(FlowJacobian, GenericUsesFiniteDifferences) {
  std::array<ScalarFunction, 3> H{
      [](std::span<const double> x) { return std::cos(x[0]) + x[1] * x[2]; },
      [](std::span<const double> x) { return 0.5 * x[3] * x[3] * x[0]; },
      [](std::span<const double> x) { return std::sin(x[1] - x[2]); },
  };
  auto X = hyperfield(standard_structure(1, "-"), HamiltonianTriple::generic(4, H));
  EXPECT_FALSE(X.exact_jacobian());
  Eigen::VectorXd x0(4);
  x0 << 0.3, -0.2, 0.25, 0.1;
  auto traj = flow_jacobian(X, x0, rk4(1e-2, 2.0));
  monitor_det_jacobian(traj);
  EXPECT_LE(traj.max_drift("detJ"), 1e-6);
}

TEST(MonitorRho, RadialTwoBlocksConserved) {
  auto s = standard_structure(2, "+-");
  auto H = radial_triple(2, {"rho1*rho2 + rho1^2/2", "rho2", "rho1/2 - rho2^2"});
  Eigen::VectorXd x0(8);
  x0 << 0.5, 0.1, -0.3, 0.2, 0.4, 0.0, 0.6, -0.2;
  IntegratorSettings set = rk4(1e-3, 100.0);
  set.stride = 100;
  auto traj = integrate(hyperfield(s, H), x0, set);
  monitor_rho(s, traj);
  EXPECT_LE(traj.max_drift("rho1"), 1e-8);
  EXPECT_LE(traj.max_drift("rho2"), 1e-8);
}

TEST(MonitorRho, ZeroStateStaysZero) {
  auto s = standard_structure(1, "+");
  auto traj = integrate(hyperfield(s, radial_triple(1, {"rho1^2", "rho1", "0"})), Eigen::VectorXd::Zero(4),
                        rk4(0.1, 1.0));
  monitor_rho(s, traj);
  for (double r : *traj.monitor("rho1")) EXPECT_EQ(r, 0.0);
}

TEST(MonitorRho, ReportedForNonRadialField) {
  auto s = standard_structure(1, "+");
  Eigen::VectorXd x0(4);
  x0 << 0.2, 0.1, -0.3, 0.4;
  auto traj = integrate(VectorField::linear(tracefree_matrix()), x0, rk4(1e-2, 2.0));
  monitor_rho(s, traj);
  EXPECT_EQ(traj.monitor("rho1")->size(), traj.size());
}

TEST(Csv, HeaderAndPrecision) {
  Trajectory traj;
  traj.dimension = 2;
  traj.times = {0.0, 0.1};
  traj.states = {Eigen::Vector2d(1.0 / 3.0, 2.0), Eigen::Vector2d(0.0, -1.0)};
  traj.add_monitor("rho1", {0.5, 0.5});
  std::ostringstream os;
  write_csv(os, traj);
  EXPECT_EQ(os.str(), "t,x1,x2,rho1\n0,0.33333333333333331,2,0.5\n0.10000000000000001,0,-1,0.5\n");
  EXPECT_THROW(traj.add_monitor("bad", {1.0}), StructuralError);
}
