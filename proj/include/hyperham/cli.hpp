#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hyperham/errors.hpp"
#include "hyperham/fields.hpp"
#include "hyperham/integrate.hpp"
#include "hyperham/invariants.hpp"
#include "hyperham/structures.hpp"

namespace hyperham::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitStructural = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitNumeric = 3;

/// Malformed or inconsistent config; the message carries "file:line: key.path: ...".
class ConfigError : public StructuralError {
 public:
  using StructuralError::StructuralError;
};

struct HamiltonianSpec {
  std::string kind;  // quadratic, polynomial, radial
  std::array<Eigen::MatrixXd, 3> D;
  std::array<std::string, 3> expressions{"0", "0", "0"};
};

struct ChecksSpec {
  std::optional<double> return_to_initial;
  std::map<std::string, double> max_drift;  // monitor group -> tolerance
  std::optional<double> great_circle;
  std::optional<double> period;
  std::optional<int> expect_k;
  std::optional<std::string> expect_verdict;
};

struct InvariantsSpec {
  bool present = false;
  ResidualMode mode = ResidualMode::Exact;
  int points = 100;
  std::optional<double> tolerance;
  bool theorem1 = true;
  bool theorem2 = true;
};

struct CertificateSpec {
  int k_max = 0;
  double tol = kDefaultCertificateTolerance;
};

struct ResonanceSpec {
  double tol = 1e-9;
  long q_max = 1000000;
};

struct ValidationSpec {
  double tolerance = kDefaultValidationTolerance;
  std::string mode = "exact";  // exact or float
};

struct ScenarioConfig {
  std::string source;
  std::string name;
  std::uint64_t seed = 0;
  int n = 1;
  std::vector<int> signs;
  HamiltonianSpec hamiltonian;
  std::optional<Eigen::VectorXd> initial_state;
  IntegratorSettings integrator;
  std::vector<std::string> monitors;
  ChecksSpec checks;
  InvariantsSpec invariants;
  CertificateSpec certificate;
  ResonanceSpec resonance;
  ValidationSpec validation;
  std::string csv = "trajectory.csv";
  std::string report = "report.json";

  int dimension() const { return 4 * n; }
  std::string sign_text() const;
  Structure structure() const;
  HamiltonianTriple triple() const;
  /// Normalized echo (defaults filled in) for reports.
  nlohmann::json echo() const;
};

/// `source` names the text in diagnostics.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

struct CommandResult {
  int exit_code = kExitPass;
  nlohmann::json report;
  std::string text;  // human-readable summary for stdout
  std::vector<std::string> warnings;  // printed to stderr
};

CommandResult cmd_validate(const ScenarioConfig& cfg, const CommandOptions& opts);
CommandResult cmd_run(const ScenarioConfig& cfg, const CommandOptions& opts);
CommandResult cmd_closed_form(const ScenarioConfig& cfg, const CommandOptions& opts);
CommandResult cmd_certify(const ScenarioConfig& cfg, const CommandOptions& opts);
CommandResult cmd_invariants(const ScenarioConfig& cfg, const CommandOptions& opts);

/// Entry point of the `hyperham` tool; returns the process exit code.
int run_cli(int argc, char** argv);

std::string version();

}  // namespace hyperham::cli
