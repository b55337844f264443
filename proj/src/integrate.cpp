#include "hyperham/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

namespace hyperham {
namespace {

using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Unpacks augmented states [x; vec(J)] into a trajectory.
class Recorder {
 public:
  Recorder(int dim, bool jacobians, int stride) : dim_(dim), jacobians_(jacobians), stride_(stride) {
    traj_.dimension = dim;
  }

  void record(double t, const Eigen::VectorXd& y, bool force) {
    if (!force && count_++ % stride_ != 0) return;
    if (force) ++count_;
    if (!traj_.times.empty() && traj_.times.back() == t) return;
    traj_.times.push_back(t);
    traj_.states.push_back(y.head(dim_));
    if (jacobians_) traj_.jacobians.push_back(Eigen::Map<const Eigen::MatrixXd>(y.data() + dim_, dim_, dim_));
  }

  Trajectory& trajectory() { return traj_; }

 private:
  int dim_;
  bool jacobians_;
  int stride_;
  long count_ = 0;
  Trajectory traj_;
};

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& why, double t, Recorder& rec) {
  throw TrajectoryError("integration stopped at t = " + short_number(t) + ": " + why, t,
                        std::move(rec.trajectory()));
}

Eigen::VectorXd eval(const Rhs& f, const Eigen::VectorXd& y, double t, Recorder& rec) {
  Eigen::VectorXd k;
  try {
    k = f(y);
  } catch (const NumericError& e) {
    fail(e.what(), t, rec);
  }
  if (!finite(k)) fail("non-finite vector field value", t, rec);
  return k;
}

void run_rk4(const Rhs& f, Eigen::VectorXd y, const IntegratorSettings& s, Recorder& rec) {
  const double h = s.step;
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(s.t_end / h - 1e-9)));
  rec.record(0.0, y, true);
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double next = (i + 1 == steps) ? s.t_end : static_cast<double>(i + 1) * h;
    const double dt = next - t;
    Eigen::VectorXd k1 = eval(f, y, t, rec);
    Eigen::VectorXd k2 = eval(f, y + 0.5 * dt * k1, t, rec);
    Eigen::VectorXd k3 = eval(f, y + 0.5 * dt * k2, t, rec);
    Eigen::VectorXd k4 = eval(f, y + dt * k3, t, rec);
    Eigen::VectorXd y_next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite(y_next)) fail("state became non-finite", t, rec);
    y = std::move(y_next);
    t = next;
    rec.record(t, y, i + 1 == steps);
  }
}

// Dormand-Prince 5(4) with PI step control. The field is autonomous, so the
// node times are not needed.
void run_rk45(const Rhs& f, Eigen::VectorXd y, const IntegratorSettings& s, Recorder& rec) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
  constexpr double kAlpha = 0.7 / 5.0, kBeta = 0.4 / 5.0;

  double t = 0.0;
  double h = std::min(s.step, s.t_end);
  double err_prev = 1e-4;
  rec.record(t, y, true);
  Eigen::VectorXd k1 = eval(f, y, t, rec);
  while (t < s.t_end) {
    const bool last = t + h >= s.t_end * (1.0 - 1e-15);
    if (last) h = s.t_end - t;
    Eigen::VectorXd k2 = eval(f, y + h * a21 * k1, t, rec);
    Eigen::VectorXd k3 = eval(f, y + h * (a31 * k1 + a32 * k2), t, rec);
    Eigen::VectorXd k4 = eval(f, y + h * (a41 * k1 + a42 * k2 + a43 * k3), t, rec);
    Eigen::VectorXd k5 = eval(f, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t, rec);
    Eigen::VectorXd k6 = eval(f, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t, rec);
    Eigen::VectorXd y_next = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXd k7 = eval(f, y_next, t, rec);
    Eigen::VectorXd err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale = s.abs_tol + s.rel_tol * std::max(std::abs(y[i]), std::abs(y_next[i]));
      err += (err_vec[i] / scale) * (err_vec[i] / scale);
    }
    err = std::sqrt(err / static_cast<double>(y.size()));
    if (!std::isfinite(err)) fail("non-finite error estimate", t, rec);

    if (err <= 1.0) {
      t = last ? s.t_end : t + h;
      y = std::move(y_next);
      k1 = std::move(k7);
      rec.record(t, y, t >= s.t_end);
      double factor = err == 0.0 ? kMaxFactor : kSafety * std::pow(err, -kAlpha) * std::pow(err_prev, kBeta);
      h *= std::clamp(factor, kMinFactor, kMaxFactor);
      err_prev = std::max(err, 1e-4);
    } else {
      h *= std::max(kMinFactor, kSafety * std::pow(err, -kAlpha));
    }
    if (t < s.t_end && h < s.min_step) {
      fail("step size fell below " + short_number(s.min_step), t, rec);
    }
  }
}

Trajectory run(const Rhs& f, const Eigen::VectorXd& y0, int dim, bool jacobians, const IntegratorSettings& s) {
  s.check();
  Recorder rec(dim, jacobians, s.stride);
  if (s.method == IntegratorMethod::RK4) {
    run_rk4(f, y0, s, rec);
  } else {
    run_rk45(f, y0, s, rec);
  }
  return std::move(rec.trajectory());
}

}  // namespace

std::string to_string(IntegratorMethod m) { return m == IntegratorMethod::RK4 ? "rk4" : "rk45"; }

IntegratorMethod parse_integrator_method(const std::string& text) {
  if (text == "rk4" || text == "RK4") return IntegratorMethod::RK4;
  if (text == "rk45" || text == "RK45") return IntegratorMethod::RK45;
  throw StructuralError("unknown integrator method '" + text + "' (expected rk4 or rk45)");
}

void IntegratorSettings::check() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw StructuralError("integrator: step must be positive");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw StructuralError("integrator: tolerances must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw StructuralError("integrator: t_end must be positive");
  if (stride < 1) throw StructuralError("integrator: stride must be at least 1");
  if (!(min_step > 0.0)) throw StructuralError("integrator: min_step must be positive");
}

const std::vector<double>* Trajectory::monitor(const std::string& name) const {
  for (const auto& [n, v] : monitors) {
    if (n == name) return &v;
  }
  return nullptr;
}

void Trajectory::add_monitor(std::string name, std::vector<double> values) {
  if (values.size() != times.size()) throw StructuralError("monitor '" + name + "' length mismatch");
  for (auto& [n, v] : monitors) {
    if (n == name) {
      v = std::move(values);
      return;
    }
  }
  monitors.emplace_back(std::move(name), std::move(values));
}

double Trajectory::max_drift(const std::string& name) const {
  const auto* v = monitor(name);
  if (!v) throw StructuralError("no monitor named '" + name + "'");
  double drift = 0.0;
  for (double x : *v) drift = std::max(drift, std::abs(x - v->front()));
  return drift;
}

Trajectory integrate(const VectorField& X, const Eigen::VectorXd& x0, const IntegratorSettings& settings) {
  if (x0.size() != X.dimension()) throw StructuralError("integrate: initial state has wrong dimension");
  return run([&X](const Eigen::VectorXd& y) { return X(y); }, x0, X.dimension(), false, settings);
}

Trajectory flow_jacobian(const VectorField& X, const Eigen::VectorXd& x0, const IntegratorSettings& settings) {
  const int dim = X.dimension();
  if (x0.size() != dim) throw StructuralError("flow_jacobian: initial state has wrong dimension");
  Eigen::VectorXd y0(dim + dim * dim);
  y0.head(dim) = x0;
  Eigen::Map<Eigen::MatrixXd>(y0.data() + dim, dim, dim).setIdentity();
  auto rhs = [&X, dim](const Eigen::VectorXd& y) {
    Eigen::VectorXd out(y.size());
    const Eigen::VectorXd x = y.head(dim);
    out.head(dim) = X(x);
    Eigen::Map<const Eigen::MatrixXd> J(y.data() + dim, dim, dim);
    Eigen::Map<Eigen::MatrixXd>(out.data() + dim, dim, dim) = X.jacobian(x) * J;
    return out;
  };
  return run(rhs, y0, dim, true, settings);
}

void monitor_rho(const Structure& s, Trajectory& traj) {
  if (traj.dimension != s.dimension()) throw StructuralError("monitor_rho: dimension mismatch");
  const int n = s.n();
  std::vector<std::vector<double>> series(n);
  for (const auto& x : traj.states) {
    Eigen::VectorXd rho = block_radii(x);
    for (int p = 0; p < n; ++p) series[p].push_back(rho[p]);
  }
  for (int p = 0; p < n; ++p) traj.add_monitor("rho" + std::to_string(p + 1), std::move(series[p]));
}

void monitor_det_jacobian(Trajectory& traj) {
  if (!traj.has_jacobians()) throw StructuralError("detJ monitor needs flow-map Jacobians");
  std::vector<double> det;
  det.reserve(traj.size());
  for (const auto& J : traj.jacobians) det.push_back(J.determinant());
  traj.add_monitor("detJ", std::move(det));
}

void monitor_hamiltonians(const HamiltonianTriple& H, Trajectory& traj) {
  for (int a = 0; a < 3; ++a) {
    std::vector<double> v;
    v.reserve(traj.size());
    for (const auto& x : traj.states) v.push_back(H.value(a, x));
    traj.add_monitor("H" + std::to_string(a + 1), std::move(v));
  }
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (int i = 0; i < traj.dimension; ++i) os << ",x" << i + 1;
  for (const auto& [name, v] : traj.monitors) os << "," << name;
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t r = 0; r < traj.size(); ++r) {
    put(traj.times[r]);
    for (int i = 0; i < traj.dimension; ++i) {
      os << ",";
      put(traj.states[r][i]);
    }
    for (const auto& [name, v] : traj.monitors) {
      os << ",";
      put(v[r]);
    }
    os << "\n";
  }
}

void write_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw StructuralError("cannot open '" + path + "' for writing");
  write_csv(os, traj);
}

}  // namespace hyperham
