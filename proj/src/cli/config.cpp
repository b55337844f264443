#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "hyperham/cli.hpp"
#include "hyperham/polynomial.hpp"

namespace hyperham::cli {
namespace {

const std::set<std::string> kMonitors{"rho", "detJ", "theta", "energies"};

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": " << (path.empty() ? "<root>" : path) << ": " << msg;
    throw ConfigError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

  void allow(const YAML::Node& node, const std::string& path, const std::set<std::string>& keys) const {
    require_map(node, path);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!keys.count(key)) fail(kv.first, join(path, key), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  double number(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, path, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  double positive(const YAML::Node& node, const std::string& path) const {
    const double v = number(node, path);
    if (!(v > 0.0)) fail(node, path, "must be positive");
    return v;
  }

  long integer(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected an integer");
    try {
      return node.as<long>();
    } catch (const YAML::Exception&) {
      fail(node, path, "expected an integer, got '" + node.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a string");
    return node.Scalar();
  }

  bool flag(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected true or false");
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail(node, path, "expected true or false, got '" + node.Scalar() + "'");
    }
  }

  Eigen::VectorXd vector(const YAML::Node& node, const std::string& path, int size) const {
    if (!node.IsSequence()) fail(node, path, "expected a list of numbers");
    if (static_cast<int>(node.size()) != size) {
      fail(node, path, "expected " + std::to_string(size) + " entries, got " + std::to_string(node.size()));
    }
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = number(node[i], path + "[" + std::to_string(i) + "]");
    return v;
  }

  Eigen::MatrixXd matrix(const YAML::Node& node, const std::string& path, int size) const {
    if (!node.IsSequence() || static_cast<int>(node.size()) != size) {
      fail(node, path, "expected a " + std::to_string(size) + "x" + std::to_string(size) + " matrix");
    }
    Eigen::MatrixXd m(size, size);
    for (int i = 0; i < size; ++i) m.row(i) = vector(node[i], path + "[" + std::to_string(i) + "]", size);
    return m;
  }

 private:
  std::string source_;
};

void check_dimensions_and_build(const ScenarioConfig& cfg, const Reader& r, const YAML::Node& ham) {
  try {
    (void)cfg.triple();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.fail(ham, "hamiltonian", e.what());
  }
}

}  // namespace

std::string ScenarioConfig::sign_text() const {
  std::string s;
  for (int v : signs) s += v > 0 ? '+' : '-';
  return s;
}

Structure ScenarioConfig::structure() const { return standard_structure<double>(n, signs); }

HamiltonianTriple ScenarioConfig::triple() const {
  const int dim = dimension();
  if (hamiltonian.kind == "quadratic") {
    return HamiltonianTriple::quadratic(hamiltonian.D[0], hamiltonian.D[1], hamiltonian.D[2]);
  }
  const bool radial = hamiltonian.kind == "radial";
  const auto names = radial ? indexed_names("rho", n) : indexed_names("x", dim);
  std::array<RationalPolynomial, 3> P{RationalPolynomial(static_cast<int>(names.size())),
                                      RationalPolynomial(static_cast<int>(names.size())),
                                      RationalPolynomial(static_cast<int>(names.size()))};
  for (int a = 0; a < 3; ++a) {
    try {
      P[a] = parse_polynomial(hamiltonian.expressions[a], names);
    } catch (const Error& e) {
      throw ConfigError(source + ": hamiltonian.H" + std::to_string(a + 1) + ": " + e.what());
    }
  }
  return radial ? HamiltonianTriple::radial_polynomial(n, P) : HamiltonianTriple::polynomial(dim, P);
}

nlohmann::json ScenarioConfig::echo() const {
  using nlohmann::json;
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["structure"] = {{"n", n}, {"signs", sign_text()}};
  json h = {{"kind", hamiltonian.kind}};
  if (hamiltonian.kind == "quadratic") {
    for (int a = 0; a < 3; ++a) {
      json rows = json::array();
      for (int i = 0; i < hamiltonian.D[a].rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < hamiltonian.D[a].cols(); ++k) row.push_back(hamiltonian.D[a](i, k));
        rows.push_back(row);
      }
      h["D" + std::to_string(a + 1)] = rows;
    }
  } else {
    for (int a = 0; a < 3; ++a) h["H" + std::to_string(a + 1)] = hamiltonian.expressions[a];
  }
  j["hamiltonian"] = h;
  if (initial_state) {
    j["initial_state"] = std::vector<double>(initial_state->data(), initial_state->data() + initial_state->size());
  }
  j["integrator"] = {{"method", to_string(integrator.method)},
                     {"step", integrator.step},
                     {"t_end", integrator.t_end},
                     {"stride", integrator.stride},
                     {"abs_tol", integrator.abs_tol},
                     {"rel_tol", integrator.rel_tol},
                     {"min_step", integrator.min_step}};
  j["monitors"] = monitors;
  json checks = json::object();
  if (this->checks.return_to_initial) checks["return_to_initial"] = *this->checks.return_to_initial;
  if (!this->checks.max_drift.empty()) checks["max_drift"] = this->checks.max_drift;
  if (this->checks.great_circle) checks["great_circle"] = *this->checks.great_circle;
  if (this->checks.period) checks["period"] = *this->checks.period;
  if (this->checks.expect_k) checks["expect_k"] = *this->checks.expect_k;
  if (this->checks.expect_verdict) checks["expect_verdict"] = *this->checks.expect_verdict;
  j["checks"] = checks;
  if (invariants.present) {
    j["invariants"] = {{"mode", to_string(invariants.mode)},
                       {"points", invariants.points},
                       {"theorem1", invariants.theorem1},
                       {"theorem2", invariants.theorem2}};
    if (invariants.tolerance) j["invariants"]["tolerance"] = *invariants.tolerance;
  }
  j["certificate"] = {{"k_max", certificate.k_max}, {"tol", certificate.tol}};
  j["resonance"] = {{"tol", resonance.tol}, {"q_max", resonance.q_max}};
  j["validation"] = {{"tolerance", validation.tolerance}, {"mode", validation.mode}};
  j["outputs"] = {{"csv", csv}, {"report", report}};
  return j;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsDefined() || root.IsNull()) throw ConfigError(source + ": empty config");
  r.allow(root, "", {"name", "seed", "structure", "hamiltonian", "initial_state", "integrator", "monitors", "checks",
                     "invariants", "certificate", "resonance", "validation", "outputs"});

  ScenarioConfig cfg;
  cfg.source = source;
  if (root["name"]) cfg.name = r.text(root["name"], "name");
  if (root["seed"]) {
    const long seed = r.integer(root["seed"], "seed");
    if (seed < 0) r.fail(root["seed"], "seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }

  const YAML::Node st = root["structure"];
  if (!st) r.fail(root, "structure", "missing section");
  r.allow(st, "structure", {"n", "signs"});
  if (!st["signs"]) r.fail(st, "structure.signs", "missing key");
  const std::string signs = r.text(st["signs"], "structure.signs");
  try {
    cfg.signs = parse_block_signs(signs);
  } catch (const Error& e) {
    r.fail(st["signs"], "structure.signs", e.what());
  }
  cfg.n = static_cast<int>(cfg.signs.size());
  if (st["n"]) {
    const long n = r.integer(st["n"], "structure.n");
    if (n != cfg.n) {
      r.fail(st["n"], "structure.n", "n = " + std::to_string(n) + " but signs has " + std::to_string(cfg.n) +
                                         " blocks");
    }
  }
  const int dim = cfg.dimension();

  const YAML::Node ham = root["hamiltonian"];
  if (!ham) r.fail(root, "hamiltonian", "missing section");
  r.require_map(ham, "hamiltonian");
  if (!ham["kind"]) r.fail(ham, "hamiltonian.kind", "missing key");
  cfg.hamiltonian.kind = r.text(ham["kind"], "hamiltonian.kind");
  if (cfg.hamiltonian.kind == "quadratic") {
    r.allow(ham, "hamiltonian", {"kind", "D1", "D2", "D3"});
    for (int a = 0; a < 3; ++a) {
      const std::string key = "D" + std::to_string(a + 1);
      const std::string path = "hamiltonian." + key;
      if (!ham[key]) {
        cfg.hamiltonian.D[a] = Eigen::MatrixXd::Zero(dim, dim);
        continue;
      }
      cfg.hamiltonian.D[a] = r.matrix(ham[key], path, dim);
      const Eigen::MatrixXd& D = cfg.hamiltonian.D[a];
      for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
          if (D(i, j) != D(j, i)) {
            r.fail(ham[key], path,
                   "matrix is not symmetric (entry [" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                       std::to_string(D(i, j)) + ", [" + std::to_string(j) + "][" + std::to_string(i) +
                       "] = " + std::to_string(D(j, i)) + ")");
          }
        }
      }
    }
  } else if (cfg.hamiltonian.kind == "polynomial" || cfg.hamiltonian.kind == "radial") {
    r.allow(ham, "hamiltonian", {"kind", "H1", "H2", "H3"});
    for (int a = 0; a < 3; ++a) {
      const std::string key = "H" + std::to_string(a + 1);
      if (ham[key]) cfg.hamiltonian.expressions[a] = r.text(ham[key], "hamiltonian." + key);
    }
  } else {
    r.fail(ham["kind"], "hamiltonian.kind",
           "unknown kind '" + cfg.hamiltonian.kind + "' (expected quadratic, polynomial or radial)");
  }
  check_dimensions_and_build(cfg, r, ham);

  if (root["initial_state"]) cfg.initial_state = r.vector(root["initial_state"], "initial_state", dim);

  if (const YAML::Node in = root["integrator"]) {
    r.allow(in, "integrator", {"method", "step", "t_end", "stride", "abs_tol", "rel_tol", "min_step"});
    if (in["method"]) {
      try {
        cfg.integrator.method = parse_integrator_method(r.text(in["method"], "integrator.method"));
      } catch (const Error& e) {
        r.fail(in["method"], "integrator.method", e.what());
      }
    }
    if (in["step"]) cfg.integrator.step = r.positive(in["step"], "integrator.step");
    if (in["t_end"]) {
      cfg.integrator.t_end = r.number(in["t_end"], "integrator.t_end");
      if (!(cfg.integrator.t_end >= 0.0)) r.fail(in["t_end"], "integrator.t_end", "must be non-negative");
    }
    if (in["stride"]) {
      const long stride = r.integer(in["stride"], "integrator.stride");
      if (stride < 1) r.fail(in["stride"], "integrator.stride", "must be >= 1");
      cfg.integrator.stride = static_cast<int>(stride);
    }
    if (in["abs_tol"]) cfg.integrator.abs_tol = r.positive(in["abs_tol"], "integrator.abs_tol");
    if (in["rel_tol"]) cfg.integrator.rel_tol = r.positive(in["rel_tol"], "integrator.rel_tol");
    if (in["min_step"]) cfg.integrator.min_step = r.positive(in["min_step"], "integrator.min_step");
  }

  if (const YAML::Node mon = root["monitors"]) {
    if (!mon.IsSequence()) r.fail(mon, "monitors", "expected a list");
    for (std::size_t i = 0; i < mon.size(); ++i) {
      const std::string path = "monitors[" + std::to_string(i) + "]";
      const std::string m = r.text(mon[i], path);
      if (!kMonitors.count(m)) r.fail(mon[i], path, "unknown monitor '" + m + "' (expected rho, detJ, theta, energies)");
      if (std::find(cfg.monitors.begin(), cfg.monitors.end(), m) != cfg.monitors.end()) {
        r.fail(mon[i], path, "duplicate monitor '" + m + "'");
      }
      cfg.monitors.push_back(m);
    }
  }

  if (const YAML::Node ch = root["checks"]) {
    r.allow(ch, "checks", {"return_to_initial", "max_drift", "great_circle", "period", "expect_k", "expect_verdict"});
    if (ch["return_to_initial"]) {
      cfg.checks.return_to_initial = r.positive(ch["return_to_initial"], "checks.return_to_initial");
    }
    if (const YAML::Node md = ch["max_drift"]) {
      r.require_map(md, "checks.max_drift");
      for (const auto& kv : md) {
        const std::string key = kv.first.as<std::string>();
        const std::string path = "checks.max_drift." + key;
        if (!kMonitors.count(key)) r.fail(kv.first, path, "unknown monitor");
        if (std::find(cfg.monitors.begin(), cfg.monitors.end(), key) == cfg.monitors.end()) {
          r.fail(kv.first, path, "monitor '" + key + "' is not enabled under monitors");
        }
        cfg.checks.max_drift[key] = r.positive(kv.second, path);
      }
    }
    if (ch["great_circle"]) cfg.checks.great_circle = r.positive(ch["great_circle"], "checks.great_circle");
    if (ch["period"]) cfg.checks.period = r.positive(ch["period"], "checks.period");
    if (ch["expect_k"]) cfg.checks.expect_k = static_cast<int>(r.integer(ch["expect_k"], "checks.expect_k"));
    if (ch["expect_verdict"]) {
      const std::string v = r.text(ch["expect_verdict"], "checks.expect_verdict");
      if (v != "NonHamiltonian" && v != "Inconclusive") {
        r.fail(ch["expect_verdict"], "checks.expect_verdict", "expected NonHamiltonian or Inconclusive");
      }
      cfg.checks.expect_verdict = v;
    }
  }

  if (const YAML::Node iv = root["invariants"]) {
    r.allow(iv, "invariants", {"mode", "points", "tolerance", "theorem1", "theorem2"});
    cfg.invariants.present = true;
    if (iv["mode"]) {
      try {
        cfg.invariants.mode = parse_residual_mode(r.text(iv["mode"], "invariants.mode"));
      } catch (const Error& e) {
        r.fail(iv["mode"], "invariants.mode", e.what());
      }
    }
    if (iv["points"]) {
      const long p = r.integer(iv["points"], "invariants.points");
      if (p < 1) r.fail(iv["points"], "invariants.points", "must be >= 1");
      cfg.invariants.points = static_cast<int>(p);
    }
    if (iv["tolerance"]) cfg.invariants.tolerance = r.positive(iv["tolerance"], "invariants.tolerance");
    if (iv["theorem1"]) cfg.invariants.theorem1 = r.flag(iv["theorem1"], "invariants.theorem1");
    if (iv["theorem2"]) cfg.invariants.theorem2 = r.flag(iv["theorem2"], "invariants.theorem2");
  }

  if (const YAML::Node ce = root["certificate"]) {
    r.allow(ce, "certificate", {"k_max", "tol"});
    if (ce["k_max"]) {
      const long k = r.integer(ce["k_max"], "certificate.k_max");
      if (k < 0) r.fail(ce["k_max"], "certificate.k_max", "must be >= 0 (0 selects 2*dim)");
      cfg.certificate.k_max = static_cast<int>(k);
    }
    if (ce["tol"]) cfg.certificate.tol = r.positive(ce["tol"], "certificate.tol");
  }

  if (const YAML::Node re = root["resonance"]) {
    r.allow(re, "resonance", {"tol", "q_max"});
    if (re["tol"]) cfg.resonance.tol = r.positive(re["tol"], "resonance.tol");
    if (re["q_max"]) {
      cfg.resonance.q_max = r.integer(re["q_max"], "resonance.q_max");
      if (cfg.resonance.q_max < 1) r.fail(re["q_max"], "resonance.q_max", "must be >= 1");
    }
  }

  if (const YAML::Node va = root["validation"]) {
    r.allow(va, "validation", {"tolerance", "mode"});
    if (va["tolerance"]) cfg.validation.tolerance = r.positive(va["tolerance"], "validation.tolerance");
    if (va["mode"]) {
      cfg.validation.mode = r.text(va["mode"], "validation.mode");
      if (cfg.validation.mode != "exact" && cfg.validation.mode != "float") {
        r.fail(va["mode"], "validation.mode", "expected exact or float");
      }
    }
  }

  if (const YAML::Node out = root["outputs"]) {
    r.allow(out, "outputs", {"csv", "report"});
    if (out["csv"]) cfg.csv = r.text(out["csv"], "outputs.csv");
    if (out["report"]) cfg.report = r.text(out["report"], "outputs.report");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path.string());
}

}  // namespace hyperham::cli
