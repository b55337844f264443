#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/iostream.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperham/cli.hpp"
#include "hyperham/fields.hpp"
#include "hyperham/integrate.hpp"
#include "hyperham/invariants.hpp"
#include "hyperham/oscillator.hpp"
#include "hyperham/structures.hpp"

namespace py = pybind11;
using namespace hyperham;

namespace {

std::array<RationalPolynomial, 3> parse_three(const std::vector<std::string>& exprs,
                                              const std::vector<std::string>& names) {
  if (exprs.empty() || exprs.size() > 3) throw StructuralError("expected one to three expressions");
  std::array<RationalPolynomial, 3> P{parse_polynomial("0", names), parse_polynomial("0", names),
                                      parse_polynomial("0", names)};
  for (std::size_t a = 0; a < exprs.size(); ++a) P[a] = parse_polynomial(exprs[a], names);
  return P;
}

IntegratorSettings settings(const std::string& method, double step, double t_end, int stride, double tol) {
  IntegratorSettings s;
  s.method = parse_integrator_method(method);
  s.step = step;
  s.t_end = t_end;
  s.stride = stride;
  s.abs_tol = s.rel_tol = tol;
  return s;
}

py::dict trajectory_dict(const Trajectory& traj) {
  py::dict d;
  Eigen::MatrixXd states(traj.size(), traj.dimension);
  for (std::size_t i = 0; i < traj.size(); ++i) states.row(i) = traj.states[i].transpose();
  d["t"] = traj.times;
  d["x"] = states;
  py::dict monitors;
  for (const auto& [name, values] : traj.monitors) monitors[py::str(name)] = values;
  d["monitors"] = monitors;
  if (traj.has_jacobians()) d["jacobians"] = traj.jacobians;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hyperhamiltonian dynamics on R^4n";
  m.attr("__version__") = cli::version();

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());

  py::class_<Structure>(m, "Structure")
      .def_property_readonly("n", &Structure::n)
      .def_property_readonly("dimension", &Structure::dimension)
      .def_property_readonly("block_signs", &Structure::block_signs)
      .def_property_readonly("metric", &Structure::metric)
      .def("J", &Structure::J, py::arg("alpha"))
      .def("Y", &Structure::Y, py::arg("alpha"))
      .def("orientation", &Structure::orientation)
      .def("mixed", &Structure::mixed)
      .def(
          "validate",
          [](const Structure& s, bool exact, double tol) {
            const ValidationReport r = exact ? validate(s.cast<Rational>(), tol) : validate(s, tol);
            py::dict d;
            for (const auto& c : r.checks) d[py::str(c.name)] = py::make_tuple(c.pass, c.residual);
            return d;
          },
          py::arg("exact") = true, py::arg("tol") = kDefaultValidationTolerance);

  m.def(
      "standard_structure", [](int n, const std::string& signs) { return standard_structure(n, signs); },
      py::arg("n"), py::arg("signs"), "Block signs as a string such as \"+-\".");

  py::class_<HamiltonianTriple>(m, "HamiltonianTriple")
      .def_static("quadratic", &HamiltonianTriple::quadratic, py::arg("D1"), py::arg("D2"), py::arg("D3"))
      .def_static(
          "polynomial",
          [](int dim, const std::vector<std::string>& exprs) {
            return HamiltonianTriple::polynomial(dim, parse_three(exprs, indexed_names("x", dim)));
          },
          py::arg("dimension"), py::arg("expressions"), "Expressions in x1..x{dimension}.")
      .def_static(
          "radial",
          [](int blocks, const std::vector<std::string>& exprs) {
            return HamiltonianTriple::radial_polynomial(blocks, parse_three(exprs, indexed_names("rho", blocks)));
          },
          py::arg("blocks"), py::arg("expressions"), "Expressions in rho1..rho{blocks}.")
      .def_property_readonly("kind", [](const HamiltonianTriple& H) { return to_string(H.kind()); })
      .def_property_readonly("dimension", &HamiltonianTriple::dimension)
      .def("value", &HamiltonianTriple::value, py::arg("alpha"), py::arg("x"))
      .def(
          "gradient", [](const HamiltonianTriple& H, int a, const Eigen::VectorXd& x) { return H.gradient(a, x); },
          py::arg("alpha"), py::arg("x"));

  m.def(
      "hyperfield", [](const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x) { return hyperfield(s, H)(x); },
      py::arg("structure"), py::arg("triple"), py::arg("x"));
  m.def(
      "divergence",
      [](const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x) {
        return divergence(hyperfield(s, H), x);
      },
      py::arg("structure"), py::arg("triple"), py::arg("x"));
  m.def("linearize", &linearize, py::arg("structure"), py::arg("triple"));

  m.def(
      "integrate",
      [](const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x0, double t_end, double step,
         const std::string& method, int stride, double tol, bool jacobian) {
        const auto X = hyperfield(s, H);
        const auto set = settings(method, step, t_end, stride, tol);
        Trajectory traj = jacobian ? flow_jacobian(X, x0, set) : integrate(X, x0, set);
        monitor_rho(s, traj);
        monitor_hamiltonians(H, traj);
        if (jacobian) monitor_det_jacobian(traj);
        return trajectory_dict(traj);
      },
      py::arg("structure"), py::arg("triple"), py::arg("x0"), py::arg("t_end"), py::arg("step") = 1e-3,
      py::arg("method") = "rk4", py::arg("stride") = 1, py::arg("tol") = 1e-10, py::arg("jacobian") = false);

  py::class_<OscillatorSolution>(m, "OscillatorSolution")
      .def_readonly("n", &OscillatorSolution::n)
      .def_readonly("x0", &OscillatorSolution::x0)
      .def_readonly("b", &OscillatorSolution::b)
      .def_readonly("c", &OscillatorSolution::c)
      .def_readonly("nu", &OscillatorSolution::nu)
      .def("__call__", [](const OscillatorSolution& sol, double t) { return evaluate_at(sol, t); }, py::arg("t"))
      .def(
          "sample",
          [](const OscillatorSolution& sol, double t_end, double step, int stride) {
            return trajectory_dict(sample(sol, t_end, step, stride));
          },
          py::arg("t_end"), py::arg("step"), py::arg("stride") = 1)
      .def(
          "great_circle_residual",
          [](const OscillatorSolution& sol, const std::vector<double>& t) { return great_circle_residual(sol, t); },
          py::arg("times"))
      .def(
          "classify",
          [](const OscillatorSolution& sol, double tol, long q_max) {
            const OrbitClass o = classify_orbit(sol, tol, q_max);
            py::dict d;
            d["m"] = o.m;
            d["k"] = o.k;
            d["classes"] = o.classes;
            d["frequencies"] = o.frequencies;
            d["manifold"] = o.manifold;
            d["closure"] = o.closure;
            d["closed"] = o.closed();
            d["label"] = o.label();
            return d;
          },
          py::arg("tol") = kDefaultResonanceTolerance, py::arg("q_max") = kDefaultMaxDenominator);

  m.def("solve", &solve, py::arg("structure"), py::arg("triple"), py::arg("x0"));

  m.def(
      "certify",
      [](const Eigen::MatrixXd& A, int k_max, double tol) {
        const auto cert = hamiltonianity_certificate(A, k_max, tol);
        py::dict d;
        d["verdict"] = cert.non_hamiltonian() ? "NonHamiltonian" : "Inconclusive";
        d["k"] = cert.non_hamiltonian() ? py::object(py::int_(cert.k)) : py::object(py::none());
        std::vector<double> traces;
        for (const auto& t : cert.traces) traces.push_back(t.trace);
        d["traces"] = traces;
        d["summary"] = cert.summary();
        return d;
      },
      py::arg("A"), py::arg("k_max") = 0, py::arg("tol") = kDefaultCertificateTolerance);

  m.def(
      "theorem_suite",
      [](const Structure& s, const HamiltonianTriple& H, const std::string& mode, int points, std::uint64_t seed,
         bool theorem1, bool theorem2) {
        SuiteOptions o;
        o.mode = parse_residual_mode(mode);
        o.points = points;
        o.seed = seed;
        o.theorem1 = theorem1;
        o.theorem2 = theorem2;
        py::list out;
        for (const auto& r : run_theorem_suite(s, H, o)) {
          py::dict d;
          d["check"] = r.check;
          d["mode"] = to_string(r.mode);
          d["points"] = r.points;
          d["max_residual"] = r.max_residual;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("structure"), py::arg("triple"), py::arg("mode") = "rational", py::arg("points") = 100,
      py::arg("seed") = 0, py::arg("theorem1") = true, py::arg("theorem2") = true);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "hyperham");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        py::scoped_ostream_redirect out;
        return cli::run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns its exit code.");
}
