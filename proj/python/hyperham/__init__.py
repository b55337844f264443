"""Hyperhamiltonian dynamics on R^4n."""

from ._core import (
    Error,
    HamiltonianTriple,
    IntegrationError,
    NumericError,
    OscillatorSolution,
    Structure,
    StructuralError,
    UnsupportedError,
    __version__,
    certify,
    divergence,
    hyperfield,
    integrate,
    linearize,
    run_cli,
    solve,
    standard_structure,
    theorem_suite,
)

__all__ = [
    "Error",
    "HamiltonianTriple",
    "IntegrationError",
    "NumericError",
    "OscillatorSolution",
    "Structure",
    "StructuralError",
    "UnsupportedError",
    "__version__",
    "certify",
    "divergence",
    "hyperfield",
    "integrate",
    "linearize",
    "run_cli",
    "solve",
    "standard_structure",
    "theorem_suite",
]
