"""Adder-based coined quantum walks: builders, simulator, routing and analysis."""

__version__ = "0.1.0"

from .builders import (
    BoundarySpec,
    WalkSpec,
    WalkSpecError,
    build_walk,
    qadd,
    qft,
    qft_dag,
)
from .circuit import Circuit, Gate, Register, adjoint, unitary_of
from .statevector import WalkState, apply_circuit, apply_gate, marginal_distribution

__all__ = [
    "BoundarySpec",
    "Circuit",
    "Gate",
    "Register",
    "WalkSpec",
    "WalkSpecError",
    "WalkState",
    "adjoint",
    "apply_circuit",
    "apply_gate",
    "build_walk",
    "marginal_distribution",
    "qadd",
    "qft",
    "qft_dag",
    "unitary_of",
]
