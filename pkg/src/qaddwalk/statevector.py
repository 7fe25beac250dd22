"""Dense statevector engine.

Basis convention: register position 0 is the most significant bit of the
basis index, so for a node register ``|q0 q1 ... q_{n-1}>`` the last qubit is
the least significant one.  Every other module relies on this ordering.

All kernels work on a reshaped ``(2,) * n`` view of the amplitude vector, with
an optional trailing batch axis so :func:`qaddwalk.circuit.unitary_of` can push
a whole identity matrix through the same code path.  Reduction order is fixed
by numpy, so results are bitwise reproducible on a given build.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .circuit import Circuit, Gate

NORM_TOL = 1e-10
STATE_TOL = 1e-9
UNITARY_TOL = 1e-9


class StateError(ValueError):
    """Invalid state construction or incompatible operands."""


@dataclass
class WalkState:
    """Normalized amplitude vector over ``num_qubits`` qubits.

    A WalkState has single-writer semantics: the functions in this module
    return fresh states and never mutate their inputs.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise StateError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "WalkState":
        return WalkState(self.num_qubits, self.amplitudes.copy())

    def allclose(self, other: "WalkState", atol: float = STATE_TOL) -> bool:
        return self.num_qubits == other.num_qubits and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=atol)
        )


@dataclass(frozen=True)
class Distribution:
    """Exact probabilities over the joint basis of ``qubits`` (first listed = MSB)."""

    qubits: tuple[int, ...]
    probabilities: np.ndarray

    def __len__(self) -> int:
        return len(self.probabilities)

    def __getitem__(self, index: int) -> float:
        return float(self.probabilities[index])


def new_basis_state(num_qubits: int, index: int = 0) -> WalkState:
    if num_qubits < 0:
        raise StateError("num_qubits must be non-negative")
    dim = 1 << num_qubits
    if not 0 <= index < dim:
        raise StateError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return WalkState(num_qubits, amps)


def from_amplitudes(amplitudes: Sequence[complex], normalize: bool = False) -> WalkState:
    amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
    n = int(round(np.log2(len(amps)))) if len(amps) else -1
    if n < 0 or (1 << n) != len(amps):
        raise StateError("amplitude vector length must be a power of two")
    if normalize:
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise StateError("cannot normalize the zero vector")
        amps = amps / norm
    elif abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
        raise StateError("amplitudes are not normalized")
    return WalkState(n, amps)


def random_state(num_qubits: int, rng: np.random.Generator) -> WalkState:
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return WalkState(num_qubits, amps / np.linalg.norm(amps))


# -- kernels ---------------------------------------------------------------


def _check_qubits(n: int, targets: Sequence[int], controls: Sequence[int]) -> None:
    qs = list(targets) + list(controls)
    if len(set(qs)) != len(qs):
        raise StateError(f"duplicate qubits in {qs}")
    for q in qs:
        if not 0 <= q < n:
            raise StateError(f"qubit {q} out of range for {n}-qubit register")


def apply_matrix(
    arr: np.ndarray,
    n: int,
    matrix: np.ndarray,
    targets: Sequence[int],
    controls: Sequence[int] = (),
) -> None:
    """In place: apply ``matrix`` to ``targets`` on the branch where all controls are 1.

    ``arr`` has shape ``(2**n,)`` or ``(2**n, batch)``.
    """
    k = len(targets)
    view = arr.reshape((2,) * n + arr.shape[1:])
    sel: list = [slice(None)] * view.ndim
    for c in controls:
        sel[c] = 1
    sel_t = tuple(sel)
    sub = view[sel_t]
    remaining = [q for q in range(n) if q not in controls]
    axes = [remaining.index(t) for t in targets]

    if k == 1 and _is_diagonal(matrix):
        ax = axes[0]
        d0, d1 = matrix[0, 0], matrix[1, 1]
        lo = [slice(None)] * sub.ndim
        hi = [slice(None)] * sub.ndim
        lo[ax] = 0
        hi[ax] = 1
        if d0 != 1:
            sub[tuple(lo)] *= d0
        if d1 != 1:
            sub[tuple(hi)] *= d1
        return

    m = np.asarray(matrix, dtype=np.complex128).reshape((2,) * (2 * k))
    out = np.tensordot(m, sub, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    view[sel_t] = out


def _is_diagonal(m: np.ndarray) -> bool:
    return m.shape == (2, 2) and m[0, 1] == 0 and m[1, 0] == 0


def apply_gate_inplace(arr: np.ndarray, n: int, gate: "Gate") -> None:
    _check_qubits(n, gate.targets, gate.controls)
    if gate.name == "x" and len(gate.targets) == 1:
        _apply_x(arr, n, gate.targets[0], gate.controls)
    elif gate.name == "swap":
        _apply_swap(arr, n, gate.targets, gate.controls)
    else:
        apply_matrix(arr, n, gate.matrix(), gate.targets, gate.controls)


def _apply_x(arr: np.ndarray, n: int, target: int, controls: Sequence[int]) -> None:
    view = arr.reshape((2,) * n + arr.shape[1:])
    sel: list = [slice(None)] * view.ndim
    for c in controls:
        sel[c] = 1
    lo, hi = list(sel), list(sel)
    lo[target] = 0
    hi[target] = 1
    tmp = view[tuple(lo)].copy()
    view[tuple(lo)] = view[tuple(hi)]
    view[tuple(hi)] = tmp


def _apply_swap(arr: np.ndarray, n: int, targets: Sequence[int], controls: Sequence[int]) -> None:
    a, b = targets
    view = arr.reshape((2,) * n + arr.shape[1:])
    sel: list = [slice(None)] * view.ndim
    for c in controls:
        sel[c] = 1
    s01, s10 = list(sel), list(sel)
    s01[a], s01[b] = 0, 1
    s10[a], s10[b] = 1, 0
    tmp = view[tuple(s01)].copy()
    view[tuple(s01)] = view[tuple(s10)]
    view[tuple(s10)] = tmp


# -- public operations -------------------------------------------------------


def apply_gate(state: WalkState, gate: "Gate") -> WalkState:
    out = state.amplitudes.copy()
    apply_gate_inplace(out, state.num_qubits, gate)
    return WalkState(state.num_qubits, out)


def apply_circuit(state: WalkState, circuit: "Circuit") -> WalkState:
    if circuit.num_qubits != state.num_qubits:
        raise StateError(
            f"circuit acts on {circuit.num_qubits} qubits, state has {state.num_qubits}"
        )
    out = state.amplitudes.copy()
    for gate in circuit.gates:
        apply_gate_inplace(out, state.num_qubits, gate)
    return WalkState(state.num_qubits, out)


def marginal_distribution(state: WalkState, qubits: Sequence[int]) -> Distribution:
    qubits = tuple(qubits)
    n = state.num_qubits
    if not qubits:
        raise StateError("marginal needs a non-empty qubit subset")
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise StateError(f"invalid qubit subset {qubits} for {n} qubits")
    probs = state.probabilities().reshape((2,) * n)
    rest = tuple(q for q in range(n) if q not in qubits)
    marg = probs.sum(axis=rest) if rest else probs
    # sum() keeps remaining axes in ascending order; reorder to the requested order
    order = sorted(qubits)
    marg = np.transpose(marg, [order.index(q) for q in qubits])
    return Distribution(qubits, marg.reshape(-1))


def fidelity(a: WalkState, b: WalkState) -> float:
    if a.num_qubits != b.num_qubits:
        raise StateError("fidelity requires states of equal size")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
