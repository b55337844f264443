#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "hyperham/cli.hpp"
#include "hyperham/oscillator.hpp"

#ifndef HYPERHAM_VERSION
#define HYPERHAM_VERSION "0.0.0"
#endif

namespace hyperham::cli {

using nlohmann::json;

namespace {

struct Check {
  std::string name;
  json value;
  json tolerance;
  bool pass = false;
  json expected;
};

json to_json(const Check& c) {
  json j = {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}};
  if (!c.expected.is_null()) j["expected"] = c.expected;
  return j;
}

std::uint64_t effective_seed(const ScenarioConfig& cfg, const CommandOptions& opts) {
  return opts.seed.value_or(cfg.seed);
}

json base_report(const std::string& command, const ScenarioConfig& cfg, const CommandOptions& opts) {
  json r;
  r["tool"] = "hyperham";
  r["version"] = version();
  r["command"] = command;
  r["scenario"] = cfg.echo();
  r["seed"] = effective_seed(cfg, opts);
  r["checks"] = json::array();
  r["outputs"] = {{"report", cfg.report}, {"csv", nullptr}};
  r["error"] = nullptr;
  return r;
}

CommandResult finish(json report, const std::vector<Check>& checks, std::string text) {
  bool pass = true;
  for (const auto& c : checks) {
    report["checks"].push_back(to_json(c));
    pass = pass && c.pass;
  }
  report["pass"] = pass;
  CommandResult res;
  res.exit_code = pass ? kExitPass : kExitCheckFailed;
  report["exit_code"] = res.exit_code;
  res.report = std::move(report);
  std::ostringstream os;
  os << text;
  for (const auto& c : checks) {
    os << "  " << (c.pass ? "ok   " : "FAIL ") << c.name << " = " << c.value.dump();
    if (!c.tolerance.is_null()) os << " (tol " << c.tolerance.dump() << ")";
    if (!c.expected.is_null()) os << " (expected " << c.expected.dump() << ")";
    os << "\n";
  }
  res.text = os.str();
  return res;
}

double tolerance_for(const CommandOptions& opts, double configured) { return opts.tol.value_or(configured); }

void require_initial_state(const ScenarioConfig& cfg, const char* command) {
  if (!cfg.initial_state) throw ConfigError(cfg.source + ": initial_state: required for " + command);
}

void reject_mixed_vartheta(const ScenarioConfig& cfg, const Structure& s) {
  if (cfg.invariants.present && cfg.invariants.theorem1 && s.mixed()) {
    throw StructuralError("mixed-sign structure: s undefined");
  }
}

std::vector<std::string> monitor_columns(const std::string& group, const ScenarioConfig& cfg) {
  if (group == "rho") return indexed_names("rho", cfg.n);
  if (group == "detJ") return {"detJ"};
  if (group == "theta") return {"theta"};
  std::vector<std::string> cols{"H1", "H2", "H3"};
  if (cfg.dimension() == 4) {
    cols.push_back("Ea");
    cols.push_back("Eb");
  }
  return cols;
}

void add_energy_monitors(const ScenarioConfig& cfg, const HamiltonianTriple& H, Trajectory& traj) {
  monitor_hamiltonians(H, traj);
  if (cfg.dimension() != 4) return;
  std::vector<double> ea, eb;
  for (const auto& x : traj.states) {
    auto [a, b] = harmonic_pair_energies(x);
    ea.push_back(a);
    eb.push_back(b);
  }
  traj.add_monitor("Ea", std::move(ea));
  traj.add_monitor("Eb", std::move(eb));
}

void add_theta_monitor(const Structure& s, const HamiltonianTriple& H, Trajectory& traj) {
  TheoremChecker checker(s, H, H.polynomials() ? ResidualMode::Float : ResidualMode::Sampled);
  std::vector<double> v;
  v.reserve(traj.size());
  for (const auto& x : traj.states) v.push_back(checker.theorem2(x));
  traj.add_monitor("theta", std::move(v));
}

void drift_checks(const ScenarioConfig& cfg, const CommandOptions& opts, const Trajectory& traj, json& report,
                  std::vector<Check>& checks) {
  json drift = json::object();
  for (const auto& [name, values] : traj.monitors) drift[name] = traj.max_drift(name);
  report["drift"] = drift;
  for (const auto& [group, tol] : cfg.checks.max_drift) {
    double worst = 0.0;
    for (const auto& col : monitor_columns(group, cfg)) worst = std::max(worst, traj.max_drift(col));
    const double t = tolerance_for(opts, tol);
    checks.push_back({"max_drift." + group, worst, t, worst <= t, nullptr});
  }
}

void return_check(const ScenarioConfig& cfg, const CommandOptions& opts, const Trajectory& traj,
                  std::vector<Check>& checks) {
  if (!cfg.checks.return_to_initial || traj.states.empty()) return;
  const double err = (traj.states.back() - *cfg.initial_state).norm();
  const double t = tolerance_for(opts, *cfg.checks.return_to_initial);
  checks.push_back({"return_to_initial", err, t, err <= t, nullptr});
}

std::filesystem::path output_path(const CommandOptions& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  return opts.out_dir / name;
}

json state_json(const Eigen::VectorXd& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

}  // namespace

std::string version() { return HYPERHAM_VERSION; }

CommandResult cmd_validate(const ScenarioConfig& cfg, const CommandOptions& opts) {
  json report = base_report("validate", cfg, opts);
  const Structure s = cfg.structure();
  reject_mixed_vartheta(cfg, s);
  const HamiltonianTriple H = cfg.triple();
  const double tol = tolerance_for(opts, cfg.validation.tolerance);
  const bool exact = cfg.validation.mode == "exact";
  const ValidationReport v = exact ? validate(s.cast<Rational>(), tol) : validate(s, tol);
  std::vector<Check> checks;
  for (const auto& c : v.checks) checks.push_back({c.name, c.residual, exact ? 0.0 : tol, c.pass, nullptr});

  // Liouville property at seeded points.
  std::mt19937_64 rng(effective_seed(cfg, opts));
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  const VectorField X = hyperfield(s, H);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd x(cfg.dimension());
    for (int i = 0; i < x.size(); ++i) x[i] = coord(rng);
    worst = std::max(worst, std::abs(divergence(X, x)));
  }
  const double div_tol = X.exact_jacobian() ? 1e-12 : 1e-8;
  checks.push_back({"divergence", worst, div_tol, worst <= div_tol, nullptr});

  report["validation"] = {{"mode", cfg.validation.mode},
                          {"orientation", s.orientation()},
                          {"mixed", s.mixed()},
                          {"hamiltonian_kind", to_string(H.kind())}};
  std::ostringstream os;
  os << "validate: n=" << cfg.n << " signs=" << cfg.sign_text() << " (" << cfg.validation.mode << ")\n";
  return finish(std::move(report), checks, os.str());
}

CommandResult cmd_run(const ScenarioConfig& cfg, const CommandOptions& opts) {
  require_initial_state(cfg, "run");
  json report = base_report("run", cfg, opts);
  const Structure s = cfg.structure();
  reject_mixed_vartheta(cfg, s);
  const HamiltonianTriple H = cfg.triple();
  const VectorField X = hyperfield(s, H);
  auto has = [&](const char* m) { return std::find(cfg.monitors.begin(), cfg.monitors.end(), m) != cfg.monitors.end(); };

  Trajectory traj;
  std::optional<TrajectoryError> failure;
  try {
    traj = has("detJ") ? flow_jacobian(X, *cfg.initial_state, cfg.integrator)
                       : integrate(X, *cfg.initial_state, cfg.integrator);
  } catch (const TrajectoryError& e) {
    failure = e;
    traj = e.partial();
  }
  for (const auto& m : cfg.monitors) {
    if (m == "rho") monitor_rho(s, traj);
    if (m == "detJ") monitor_det_jacobian(traj);
    if (m == "energies") add_energy_monitors(cfg, H, traj);
    if (m == "theta") add_theta_monitor(s, H, traj);
  }
  write_csv(output_path(opts, cfg.csv).string(), traj);
  report["outputs"]["csv"] = cfg.csv;
  report["samples"] = traj.size();
  std::vector<Check> checks;
  drift_checks(cfg, opts, traj, report, checks);
  if (!traj.states.empty()) {
    report["final_time"] = traj.times.back();
    report["final_state"] = state_json(traj.states.back());
  }
  std::ostringstream os;
  os << "run: " << to_string(cfg.integrator.method) << " t_end=" << cfg.integrator.t_end << ", " << traj.size()
     << " samples -> " << cfg.csv << "\n";
  if (failure) {
    report["error"] = {{"kind", "numeric"}, {"message", failure->what()}, {"last_good_time", failure->last_good_time()}};
    CommandResult res = finish(std::move(report), checks, os.str());
    res.exit_code = kExitNumeric;
    res.report["pass"] = false;
    res.report["exit_code"] = kExitNumeric;
    res.text += std::string("  integration failed: ") + failure->what() + "\n";
    return res;
  }
  return_check(cfg, opts, traj, checks);
  return finish(std::move(report), checks, os.str());
}

CommandResult cmd_closed_form(const ScenarioConfig& cfg, const CommandOptions& opts) {
  require_initial_state(cfg, "closed-form");
  json report = base_report("closed-form", cfg, opts);
  const Structure s = cfg.structure();
  reject_mixed_vartheta(cfg, s);
  for (const auto& m : cfg.monitors) {
    if (m == "detJ" || m == "theta") {
      throw ConfigError(cfg.source + ": monitors: '" + m + "' is not available for closed-form");
    }
  }
  const HamiltonianTriple H = cfg.triple();
  const OscillatorSolution sol = solve(s, H, *cfg.initial_state);
  Trajectory traj = sample(sol, cfg.integrator.t_end, cfg.integrator.step, cfg.integrator.stride);
  for (const auto& m : cfg.monitors) {
    if (m == "rho") monitor_rho(s, traj);
    if (m == "energies") add_energy_monitors(cfg, H, traj);
  }
  write_csv(output_path(opts, cfg.csv).string(), traj);
  report["outputs"]["csv"] = cfg.csv;
  report["samples"] = traj.size();

  const OrbitClass orbit = classify_orbit(sol, cfg.resonance.tol, cfg.resonance.q_max);
  json blocks = json::array();
  for (int p = 0; p < sol.n; ++p) {
    json b = {{"b", sol.b[p]}, {"nu", sol.nu[p]}, {"c", sol.c[p]}};
    b["period"] = sol.frozen(p) ? json(nullptr) : json(2.0 * std::numbers::pi / sol.nu[p]);
    blocks.push_back(b);
  }
  report["orbit"] = {{"m", orbit.m},
                     {"k", orbit.k},
                     {"classes", orbit.classes},
                     {"frequencies", orbit.frequencies},
                     {"manifold", orbit.manifold},
                     {"closure", orbit.closure},
                     {"closed", orbit.closed()},
                     {"label", orbit.label()},
                     {"blocks", blocks}};

  std::vector<Check> checks;
  drift_checks(cfg, opts, traj, report, checks);
  if (cfg.checks.great_circle) {
    const double r = great_circle_residual(sol, traj.states);
    const double t = tolerance_for(opts, *cfg.checks.great_circle);
    checks.push_back({"great_circle", r, t, r <= t, nullptr});
  }
  if (cfg.checks.period) {
    const double t = tolerance_for(opts, *cfg.checks.period);
    double worst = 0.0;
    for (int p = 0; p < sol.n; ++p) {
      if (sol.frozen(p) || sol.xi0(p).norm() == 0.0) continue;
      const double T = measure_period(sol, p, traj.times, traj.states);
      worst = std::max(worst, std::abs(T - 2.0 * std::numbers::pi / sol.nu[p]));
    }
    checks.push_back({"period", worst, t, worst <= t, nullptr});
  }
  if (cfg.checks.expect_k) {
    checks.push_back({"orbit.k", orbit.k, nullptr, orbit.k == *cfg.checks.expect_k, *cfg.checks.expect_k});
  }
  return_check(cfg, opts, traj, checks);
  std::ostringstream os;
  os << "closed-form: " << orbit.label() << "\n";
  return finish(std::move(report), checks, os.str());
}

CommandResult cmd_certify(const ScenarioConfig& cfg, const CommandOptions& opts) {
  json report = base_report("certify", cfg, opts);
  const Structure s = cfg.structure();
  reject_mixed_vartheta(cfg, s);
  const HamiltonianTriple H = cfg.triple();
  if (H.kind() != HamiltonianKind::Quadratic) {
    throw StructuralError("certify: requires a quadratic triple, got " + to_string(H.kind()));
  }
  const Eigen::MatrixXd A = linearize(s, H);
  const double tol = tolerance_for(opts, cfg.certificate.tol);
  const HamiltonianityCertificate cert = hamiltonianity_certificate(A, cfg.certificate.k_max, tol);
  const MatrixXr Ar = A.unaryExpr([](double v) { return Rational(v); });

  std::ostringstream os;
  os << "certify: A = sum_a Y_a g^-1 D^a (" << A.rows() << "x" << A.cols() << ")\n";
  os << "  k  Tr(A^(2k+1))\n";
  json traces = json::array();
  for (const auto& t : cert.traces) {
    const std::string exact_trace = odd_power_trace(Ar, t.k).str();
    os << "  " << std::setw(2) << t.k << "  " << exact_trace << "\n";
    traces.push_back({{"k", t.k}, {"trace", t.trace}, {"exact", exact_trace}});
  }
  const bool nonham = cert.non_hamiltonian();
  report["certificate"] = {{"verdict", nonham ? "NonHamiltonian" : "Inconclusive"},
                           {"k", nonham ? json(cert.k) : json(nullptr)},
                           {"trace", nonham ? json(cert.trace_value) : json(nullptr)},
                           {"k_max", cert.k_max},
                           {"tol", cert.tolerance},
                           {"traces", traces},
                           {"message", cert.summary()}};
  os << "  " << cert.summary() << "\n";
  std::vector<Check> checks;
  if (cfg.checks.expect_verdict) {
    const std::string got = nonham ? "NonHamiltonian" : "Inconclusive";
    checks.push_back({"verdict", got, nullptr, got == *cfg.checks.expect_verdict, *cfg.checks.expect_verdict});
  }
  if (cfg.checks.expect_k) {
    const int got = nonham ? cert.k : -1;
    checks.push_back({"certificate.k", got, nullptr, got == *cfg.checks.expect_k, *cfg.checks.expect_k});
  }
  return finish(std::move(report), checks, os.str());
}

CommandResult cmd_invariants(const ScenarioConfig& cfg, const CommandOptions& opts) {
  json report = base_report("invariants", cfg, opts);
  if (cfg.n > 2) {
    throw StructuralError("invariants: n = " + std::to_string(cfg.n) +
                          " exceeds the form-level limit (n <= 2, ambient dimension cap " +
                          std::to_string(kDefaultDimensionCap) + ")");
  }
  const Structure s = cfg.structure();
  const InvariantsSpec spec = cfg.invariants;
  if (spec.theorem1 && s.mixed()) throw StructuralError("mixed-sign structure: s undefined");
  const HamiltonianTriple H = cfg.triple();
  CommandResult pre;
  if (cfg.n == 2) pre.warnings.push_back("invariants: n = 2 builds forms on R^9; expect a slower run");

  SuiteOptions so;
  so.mode = spec.mode;
  so.points = spec.points;
  so.seed = effective_seed(cfg, opts);
  if (opts.tol) {
    so.tolerance = *opts.tol;
  } else if (spec.tolerance) {
    so.tolerance = *spec.tolerance;
  }
  so.theorem1 = spec.theorem1;
  so.theorem2 = spec.theorem2;
  const auto results = run_theorem_suite(s, H, so);

  json inv = json::array();
  std::vector<Check> checks;
  for (const auto& r : results) {
    inv.push_back({{"check", r.check},
                   {"mode", to_string(r.mode)},
                   {"points", r.points},
                   {"max_residual", r.max_residual},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
    checks.push_back({r.check, r.max_residual, r.tolerance, r.pass, nullptr});
  }
  report["invariants"] = inv;
  std::ostringstream os;
  os << "invariants: " << to_string(spec.mode) << " mode, " << spec.points << " points, seed " << so.seed << "\n";
  CommandResult res = finish(std::move(report), checks, os.str());
  res.warnings = pre.warnings;
  return res;
}

namespace {

CommandResult dispatch(const std::string& command, const ScenarioConfig& cfg, const CommandOptions& opts) {
  if (command == "validate") return cmd_validate(cfg, opts);
  if (command == "run") return cmd_run(cfg, opts);
  if (command == "closed-form") return cmd_closed_form(cfg, opts);
  if (command == "certify") return cmd_certify(cfg, opts);
  return cmd_invariants(cfg, opts);
}

void write_report(const CommandOptions& opts, const std::string& name, const json& report) {
  std::ofstream out(output_path(opts, name));
  if (!out) throw StructuralError("cannot write report " + (opts.out_dir / name).string());
  out << report.dump(2) << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"hyperham: hyperhamiltonian dynamics on R^4n"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double tol = 0.0;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "check structure invariants and the config"},
      {"run", "integrate the flow and monitor invariants"},
      {"closed-form", "sample the radial closed-form solution and classify the orbit"},
      {"certify", "odd-power trace test for a quadratic triple"},
      {"invariants", "form-level theorem residuals at seeded points"}};
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::pair<CLI::Option*, CLI::Option*>> seed_tol;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "scenario file (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    auto* so = sub->add_option("--seed", seed, "seed for randomized checks (overrides config)");
    auto* to = sub->add_option("--tol", tol, "tolerance override")->check(CLI::PositiveNumber);
    subs[name] = sub;
    seed_tol[name] = {so, to};
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitStructural;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  CommandOptions opts;
  opts.out_dir = out_dir;
  if (seed_tol[command].first->count()) opts.seed = seed;
  if (seed_tol[command].second->count()) opts.tol = tol;

  std::optional<ScenarioConfig> cfg;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto fail = [&](int code, const std::string& kind, const std::string& message) {
    std::cerr << "hyperham " << command << ": " << message << "\n";
    if (cfg) {
      json report = base_report(command, *cfg, opts);
      report["pass"] = false;
      report["exit_code"] = code;
      report["error"] = {{"kind", kind}, {"message", message}};
      report["wall_time_s"] = elapsed();
      try {
        write_report(opts, cfg->report, report);
      } catch (const std::exception& e) {
        std::cerr << "hyperham: " << e.what() << "\n";
      }
    }
    return code;
  };
  try {
    cfg = load_config(config_path);
    CommandResult res = dispatch(command, *cfg, opts);
    res.report["wall_time_s"] = elapsed();
    write_report(opts, cfg->report, res.report);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << res.text << command << ": " << (res.exit_code == kExitPass ? "PASS" : "FAIL") << " -> "
              << (opts.out_dir / cfg->report).string() << "\n";
    return res.exit_code;
  } catch (const NumericError& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const IntegrationError& e) {
    return fail(kExitNumeric, "numeric", e.what());
  } catch (const UnsupportedError& e) {
    return fail(kExitStructural, "unsupported", e.what());
  } catch (const ConfigError& e) {
    return fail(kExitStructural, "config", e.what());
  } catch (const StructuralError& e) {
    return fail(kExitStructural, "structural", e.what());
  } catch (const std::exception& e) {
    return fail(kExitStructural, "error", e.what());
  }
}

}  // namespace hyperham::cli
