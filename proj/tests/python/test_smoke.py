import json
import math
import os
import pathlib
import subprocess
import sys

import numpy as np
import pytest

import hyperham as hh

ROOT = pathlib.Path(os.environ.get("HYPERHAM_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
SCENARIOS = ROOT / "scenarios"

TRACEFREE_D1 = np.array([[1, 0, 0, 1], [0, -1, -1, 0], [0, -1, 1, 0], [1, 0, 0, -1]], dtype=float)


def test_structure_validates_exactly():
    s = hh.standard_structure(2, "+-")
    assert s.dimension == 8
    assert s.mixed()
    checks = s.validate()
    assert all(ok and residual == 0.0 for ok, residual in checks.values())


def test_quaternion_relation():
    s = hh.standard_structure(1, "-")
    Y = [s.Y(a) for a in range(3)]
    assert np.array_equal(Y[0] @ Y[1], Y[2])
    assert np.array_equal(Y[0] @ Y[0], -np.eye(4))


def test_bad_signs_raise():
    with pytest.raises(hh.StructuralError):
        hh.standard_structure(1, "x")
    with pytest.raises(hh.Error):
        hh.HamiltonianTriple.polynomial(4, ["x9"])


def test_rotation_returns_after_full_turn():
    s = hh.standard_structure(1, "+")
    H = hh.HamiltonianTriple.quadratic(np.eye(4), np.zeros((4, 4)), np.zeros((4, 4)))
    x0 = np.array([1.0, 0.5, -0.25, 0.75])
    traj = hh.integrate(s, H, x0, 2 * math.pi, step=1e-3, method="rk45", tol=1e-13)
    assert np.linalg.norm(traj["x"][-1] - x0) < 1e-9
    assert set(traj["monitors"]) >= {"rho1", "H1", "H2", "H3"}


def test_tracefree_volume_and_certificate():
    s = hh.standard_structure(1, "+")
    H = hh.HamiltonianTriple.quadratic(TRACEFREE_D1, np.eye(4), np.zeros((4, 4)))
    traj = hh.integrate(s, H, np.array([0.3, -0.2, 0.1, 0.4]), 5.0, jacobian=True)
    assert abs(traj["monitors"]["detJ"][-1] - 1.0) < 1e-6
    cert = hh.certify(hh.linearize(s, H))
    assert cert["verdict"] == "NonHamiltonian"
    assert cert["k"] == 1
    assert cert["traces"][1] == pytest.approx(-24.0)


def test_closed_form_matches_integration():
    s = hh.standard_structure(1, "+")
    H = hh.HamiltonianTriple.radial(1, ["rho1^2/2"])
    x0 = np.array([1.0, 1.0, 0.0, 0.0])
    sol = hh.solve(s, H, x0)
    assert sol.nu == [1.0]
    traj = hh.integrate(s, H, x0, 10.0)
    assert np.linalg.norm(traj["x"][-1] - sol(10.0)) < 1e-6
    assert sol.classify()["k"] == 1


def test_resonant_pair_closes():
    s = hh.standard_structure(2, "++")
    sol = hh.solve(s, hh.HamiltonianTriple.radial(2, ["rho1 + 2*rho2"]), np.eye(8)[0] + np.eye(8)[5])
    assert sol.classify()["closure"] == "circle"
    assert np.linalg.norm(sol(2 * math.pi) - sol.x0) < 1e-9


def test_theorem_suite():
    s = hh.standard_structure(1, "+")
    H = hh.HamiltonianTriple.polynomial(4, ["x1^3/3 - x2*x3*x4", "x2^2*x3/2", "x4^2"])
    rows = hh.theorem_suite(s, H, mode="float", points=20, seed=1)
    assert [r["check"] for r in rows] == ["theorem1", "theorem2", "dTheta"]
    assert all(r["pass"] and r["max_residual"] <= 1e-10 for r in rows)
    with pytest.raises(hh.StructuralError):
        hh.theorem_suite(hh.standard_structure(2, "+-"), hh.HamiltonianTriple.polynomial(8, ["x1"]))


def test_cli_in_process(tmp_path):
    code = hh.run_cli(["certify", "--config", str(SCENARIOS / "certify_tracefree.yaml"), "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "certify_tracefree.json").read_text())
    assert report["certificate"]["verdict"] == "NonHamiltonian"
    assert hh.run_cli(["invariants", "--config", str(SCENARIOS / "invariants_n3.yaml"), "--out", str(tmp_path)]) == 1


def test_reports_match_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "schemas" / "report.schema.json").read_text())
    for name, command in [("validate_plus", "validate"), ("closed_form_rho", "closed-form"),
                          ("invariants_quadratic", "invariants")]:
        hh.run_cli([command, "--config", str(SCENARIOS / f"{name}.yaml"), "--out", str(tmp_path)])
        jsonschema.validate(json.loads((tmp_path / f"{name}.json").read_text()), schema)
