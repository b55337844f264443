#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyperham/fields.hpp"
#include "hyperham/integrate.hpp"
#include "hyperham/structures.hpp"

namespace hyperham {

/// Per-block uniform rotation xi_p(t) = [cos(nu_p t) I + sin(nu_p t) L_p] xi_p(0).
struct OscillatorSolution {
  int n = 0;
  Eigen::VectorXd x0;
  std::vector<double> b;                 // rho_p(0)
  std::vector<std::array<double, 3>> c;  // c^a_p = A^a_p(b)
  std::vector<double> nu;
  std::vector<Eigen::Matrix4d> L;  // zero for frozen blocks

  int dimension() const { return 4 * n; }
  bool frozen(int p) const { return nu.at(p) == 0.0; }
  Eigen::Vector4d xi0(int p) const { return x0.segment<4>(4 * p); }
};

/// Requires a radial triple and a euclidean block-layout structure.
OscillatorSolution solve(const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x0);

Eigen::VectorXd evaluate_at(const OscillatorSolution& sol, double t);

/// Closed-form samples on the grid t_i = i * step (final sample at t_end).
Trajectory sample(const OscillatorSolution& sol, double t_end, double step, int stride = 1);

/// Max over samples and excited blocks of |xi_p - P xi_p|, P the orthogonal
/// projector onto span{xi_p(0), L_p xi_p(0)}. Frozen blocks and xi_p(0) = 0
/// contribute 0.
double great_circle_residual(const OscillatorSolution& sol, const std::vector<Eigen::VectorXd>& states);
double great_circle_residual(const OscillatorSolution& sol, const std::vector<double>& times);

/// First time the unwrapped rotation angle of block p reaches 2 pi, linearly
/// interpolated between samples. Throws StructuralError when the block is
/// frozen or the samples never complete a turn.
double measure_period(const OscillatorSolution& sol, int p, const std::vector<double>& times,
                      const std::vector<Eigen::VectorXd>& states);

struct OrbitClass {
  int m = 0;  // excited blocks
  int k = 0;  // rational classes
  std::vector<std::vector<int>> classes;
  std::vector<double> frequencies;
  std::string manifold;  // "V^m"
  std::string closure;   // "point", "circle" or "T^k"
  double tol = 0.0;
  long q_max = 0;

  bool closed() const { return k <= 1; }
  std::string label() const;
};

inline constexpr double kDefaultResonanceTolerance = 1e-9;
inline constexpr long kDefaultMaxDenominator = 1000000;

/// Continued-fraction convergents a/b of r with b <= q_max.
std::vector<std::pair<long, long>> convergents(double r, long q_max);

/// True when some convergent a/b of r (b <= q_max) has |b r - a| <= tol.
bool numerically_rational(double r, double tol, long q_max);

OrbitClass classify_orbit(const OscillatorSolution& sol, double tol = kDefaultResonanceTolerance,
                          long q_max = kDefaultMaxDenominator);

/// E_a = (x1^2 + x2^2)/2, E_b = (x3^2 + x4^2)/2 on R^4.
std::pair<double, double> harmonic_pair_energies(const Eigen::VectorXd& x);

}  // namespace hyperham
