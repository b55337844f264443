#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyperham/errors.hpp"
#include "hyperham/fields.hpp"
#include "hyperham/structures.hpp"

namespace hyperham {

enum class IntegratorMethod { RK4, RK45 };

std::string to_string(IntegratorMethod m);
IntegratorMethod parse_integrator_method(const std::string& text);

struct IntegratorSettings {
  IntegratorMethod method = IntegratorMethod::RK4;
  /// Fixed step for RK4, initial step for RK45.
  double step = 1e-3;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double t_end = 1.0;
  /// Keep every `stride`-th accepted step; the final state is always kept.
  int stride = 1;
  /// RK45 gives up when the step would fall below this.
  double min_step = 1e-14;

  void check() const;
};

using MonitorSeries = std::pair<std::string, std::vector<double>>;

struct Trajectory {
  int dimension = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::MatrixXd> jacobians;
  /// Named scalar series, one value per sample, in insertion order.
  std::vector<MonitorSeries> monitors;

  std::size_t size() const { return times.size(); }
  bool has_jacobians() const { return !jacobians.empty(); }
  const std::vector<double>* monitor(const std::string& name) const;
  void add_monitor(std::string name, std::vector<double> values);
  /// max_t |m(t) - m(0)|
  double max_drift(const std::string& name) const;
};

/// Integration stopped early; `partial` holds every sample up to the last good time.
class TrajectoryError : public IntegrationError {
 public:
  TrajectoryError(const std::string& what, double last_good_time, Trajectory partial)
      : IntegrationError(what, last_good_time), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Throws TrajectoryError when the field turns non-finite or RK45 hits the
/// step floor.
Trajectory integrate(const VectorField& X, const Eigen::VectorXd& x0, const IntegratorSettings& settings);

/// Integrates dJ/dt = Df(x(t)) J with J(0) = I alongside the state.
Trajectory flow_jacobian(const VectorField& X, const Eigen::VectorXd& x0, const IntegratorSettings& settings);

/// Appends rho1..rhon (rho_p = |xi_p|^2 / 2) to the monitors.
void monitor_rho(const Structure& s, Trajectory& traj);

/// Appends detJ; requires jacobians.
void monitor_det_jacobian(Trajectory& traj);

/// Appends H1..H3 evaluated along the trajectory.
void monitor_hamiltonians(const HamiltonianTriple& H, Trajectory& traj);

/// CSV with header `t,x1,...,x{dim}[,monitors]` and %.17g values.
void write_csv(std::ostream& os, const Trajectory& traj);
void write_csv(const std::string& path, const Trajectory& traj);

}  // namespace hyperham
