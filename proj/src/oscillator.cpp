#include "hyperham/oscillator.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hyperham/errors.hpp"

namespace hyperham {
namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

OscillatorSolution solve(const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x0) {
  const auto* radial = H.radial_data();
  if (!radial) throw StructuralError("oscillator: requires a radial triple, got " + to_string(H.kind()));
  if (!s.has_block_layout() || !s.euclidean()) {
    throw StructuralError("oscillator: requires a standard block-reducible structure");
  }
  if (radial->blocks != s.n()) throw StructuralError("oscillator: block count mismatch");
  if (x0.size() != s.dimension()) throw StructuralError("oscillator: initial state has wrong dimension");

  OscillatorSolution sol;
  sol.n = s.n();
  sol.x0 = x0;
  Eigen::VectorXd b = block_radii(x0);
  sol.b.assign(b.data(), b.data() + b.size());
  std::array<Eigen::VectorXd, 3> A;
  for (int a = 0; a < 3; ++a) {
    A[a] = radial->H[a].partials(b);
    if (!A[a].allFinite()) throw NumericError("oscillator: non-finite partial of H^" + std::to_string(a + 1));
  }
  for (int p = 0; p < sol.n; ++p) {
    std::array<double, 3> c{A[0][p], A[1][p], A[2][p]};
    const double nu = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
    if (nu > 0.0) {
      for (int a = 0; a < 3; ++a) L += (c[a] / nu) * s.field_map(a).block<4, 4>(4 * p, 4 * p);
    }
    sol.c.push_back(c);
    sol.nu.push_back(nu);
    sol.L.push_back(L);
  }
  return sol;
}

Eigen::VectorXd evaluate_at(const OscillatorSolution& sol, double t) {
  Eigen::VectorXd x = sol.x0;
  for (int p = 0; p < sol.n; ++p) {
    if (sol.frozen(p)) continue;
    const double phase = sol.nu[p] * t;
    const Eigen::Vector4d xi = sol.xi0(p);
    x.segment<4>(4 * p) = std::cos(phase) * xi + std::sin(phase) * (sol.L[p] * xi);
  }
  return x;
}

Trajectory sample(const OscillatorSolution& sol, double t_end, double step, int stride) {
  if (!(step > 0.0) || !(t_end >= 0.0) || stride < 1) throw StructuralError("sample: bad grid");
  Trajectory traj;
  traj.dimension = sol.dimension();
  const long steps = static_cast<long>(std::ceil(t_end / step - 1e-9));
  for (long i = 0; i <= steps; ++i) {
    if (i % stride != 0 && i != steps) continue;
    const double t = i == steps ? t_end : static_cast<double>(i) * step;
    traj.times.push_back(t);
    traj.states.push_back(evaluate_at(sol, t));
  }
  return traj;
}

double great_circle_residual(const OscillatorSolution& sol, const std::vector<Eigen::VectorXd>& states) {
  double worst = 0.0;
  for (int p = 0; p < sol.n; ++p) {
    const Eigen::Vector4d xi0 = sol.xi0(p);
    if (sol.frozen(p) || xi0.norm() == 0.0) continue;
    // L antisymmetric, so xi0 and L xi0 are orthogonal with equal norms.
    const Eigen::Vector4d u = xi0.normalized();
    const Eigen::Vector4d v = (sol.L[p] * xi0).normalized();
    for (const auto& x : states) {
      const Eigen::Vector4d xi = x.segment<4>(4 * p);
      const Eigen::Vector4d off = xi - u.dot(xi) * u - v.dot(xi) * v;
      worst = std::max(worst, off.norm());
    }
  }
  return worst;
}

double great_circle_residual(const OscillatorSolution& sol, const std::vector<double>& times) {
  std::vector<Eigen::VectorXd> states;
  states.reserve(times.size());
  for (double t : times) states.push_back(evaluate_at(sol, t));
  return great_circle_residual(sol, states);
}

double measure_period(const OscillatorSolution& sol, int p, const std::vector<double>& times,
                      const std::vector<Eigen::VectorXd>& states) {
  if (p < 0 || p >= sol.n) throw StructuralError("measure_period: block index out of range");
  if (sol.frozen(p) || sol.xi0(p).norm() == 0.0) throw StructuralError("measure_period: block is frozen");
  if (times.size() != states.size()) throw StructuralError("measure_period: times/states length mismatch");
  const Eigen::Vector4d u = sol.xi0(p);
  const Eigen::Vector4d v = sol.L[p] * u;
  constexpr double kTurn = 2.0 * std::numbers::pi;
  double prev_angle = 0.0, unwrapped = 0.0, prev_t = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Eigen::Vector4d xi = states[i].segment<4>(4 * p);
    const double angle = std::atan2(v.dot(xi), u.dot(xi));
    if (i == 0) {
      prev_angle = angle;
      unwrapped = angle;
      prev_t = times[0];
      continue;
    }
    double delta = angle - prev_angle;
    if (delta > std::numbers::pi) delta -= kTurn;
    if (delta < -std::numbers::pi) delta += kTurn;
    const double next = unwrapped + delta;
    if (next >= kTurn) {
      return prev_t + (kTurn - unwrapped) / (next - unwrapped) * (times[i] - prev_t);
    }
    unwrapped = next;
    prev_angle = angle;
    prev_t = times[i];
  }
  throw StructuralError("measure_period: samples do not cover a full turn");
}

std::vector<std::pair<long, long>> convergents(double r, long q_max) {
  std::vector<std::pair<long, long>> out;
  if (!std::isfinite(r) || q_max < 1) return out;
  // h_k = a_k h_{k-1} + h_{k-2}, same for k_k.
  long double h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  long double x = r;
  for (int iter = 0; iter < 64; ++iter) {
    const long double a = std::floor(x);
    const long double h = a * h_prev + h_prev2;
    const long double k = a * k_prev + k_prev2;
    if (k > q_max || std::abs(h) > 9e18L) break;
    out.emplace_back(static_cast<long>(h), static_cast<long>(k));
    const long double frac = x - a;
    if (frac < 1e-18L) break;
    x = 1.0L / frac;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
  }
  return out;
}

bool numerically_rational(double r, double tol, long q_max) {
  for (const auto& [a, b] : convergents(r, q_max)) {
    if (std::abs(static_cast<double>(b) * r - static_cast<double>(a)) <= tol) return true;
  }
  return false;
}

std::string OrbitClass::label() const {
  std::ostringstream os;
  os << "m=" << m << ", k=" << k << ", invariant manifold " << manifold << ", orbit closure " << closure
     << " (numerically rational at tol=" << tol << ", q_max=" << q_max << ")";
  return os.str();
}

OrbitClass classify_orbit(const OscillatorSolution& sol, double tol, long q_max) {
  if (q_max < 1) throw StructuralError("classify_orbit: q_max must be >= 1");
  OrbitClass out;
  out.tol = tol;
  out.q_max = q_max;
  std::vector<int> excited;
  for (int p = 0; p < sol.n; ++p) {
    if (sol.b[p] > 0.0 && sol.nu[p] > 0.0) {
      excited.push_back(p);
      out.frequencies.push_back(sol.nu[p]);
    }
  }
  out.m = static_cast<int>(excited.size());
  std::vector<int> parent(excited.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < excited.size(); ++i) {
    for (std::size_t j = i + 1; j < excited.size(); ++j) {
      if (numerically_rational(sol.nu[excited[i]] / sol.nu[excited[j]], tol, q_max)) {
        parent[find_root(parent, static_cast<int>(i))] = find_root(parent, static_cast<int>(j));
      }
    }
  }
  std::vector<int> class_of(excited.size(), -1);
  for (std::size_t i = 0; i < excited.size(); ++i) {
    const int root = find_root(parent, static_cast<int>(i));
    if (class_of[root] < 0) {
      class_of[root] = static_cast<int>(out.classes.size());
      out.classes.emplace_back();
    }
    out.classes[class_of[root]].push_back(excited[i]);
  }
  out.k = static_cast<int>(out.classes.size());
  out.manifold = "V^" + std::to_string(out.m);
  if (out.k == 0) {
    out.closure = "point";
  } else if (out.k == 1) {
    out.closure = "circle";
  } else {
    out.closure = "T^" + std::to_string(out.k);
  }
  return out;
}

std::pair<double, double> harmonic_pair_energies(const Eigen::VectorXd& x) {
  if (x.size() != 4) throw StructuralError("harmonic_pair_energies: expected a point of R^4");
  return {0.5 * (x[0] * x[0] + x[1] * x[1]), 0.5 * (x[2] * x[2] + x[3] * x[3])};
}

}  // namespace hyperham
