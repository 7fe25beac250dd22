"""Lowering to the {CX, H, X, R_phi} basis and gate accounting.

Fixed identities only; no peephole optimisation.  Multi-controlled gates are
reduced with a Toffoli ladder into clean ancillas that are appended to the
register (role ``ancilla``, dim ``"dec"``) and returned to |0> afterwards.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circuit import (
    CCX,
    CX,
    Circuit,
    CircuitError,
    Gate,
    H,
    P,
    Qubit,
)

QUARTER = math.pi / 4


class DecompositionError(CircuitError):
    pass


def _zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    """u = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)."""
    u = np.asarray(u, dtype=np.complex128)
    det = np.linalg.det(u)
    alpha = np.angle(det) / 2
    v = u * np.exp(-1j * alpha)  # now in SU(2)
    gamma = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) > 1e-12 and abs(v[1, 0]) > 1e-12:
        s = np.angle(v[1, 1])  # (beta + delta)/2
        d = np.angle(v[1, 0])  # (beta - delta)/2
        beta, delta = s + d, s - d
    elif abs(v[1, 0]) <= 1e-12:
        beta, delta = 2 * np.angle(v[1, 1]), 0.0
    else:
        beta, delta = 2 * np.angle(v[1, 0]), 0.0
    return float(alpha), float(beta), float(gamma), float(delta)


def _rz(theta: float, q: int) -> list[Gate]:
    # Rz(theta) equals P(theta) up to a phase e^{-i theta/2}; callers balance it.
    return [P(theta, q)] if abs(theta) > 1e-15 else []


def _ry(theta: float, q: int) -> list[Gate]:
    # Ry = S H Rz H Sdg (as operators); gate order is reversed.
    if abs(theta) <= 1e-15:
        return []
    return [P(-math.pi / 2, q), H(q), P(theta, q), H(q), P(math.pi / 2, q)]


def _single_qubit(u: np.ndarray, q: int) -> list[Gate]:
    _, beta, gamma, delta = _zyz(u)
    return _rz(delta, q) + _ry(gamma, q) + _rz(beta, q)


def _controlled_single(u: np.ndarray, c: int, t: int) -> list[Gate]:
    """Controlled-U with 2 CX (A X B X C construction)."""
    alpha, beta, gamma, delta = _zyz(u)
    gates: list[Gate] = []
    # C = Rz((delta - beta)/2)
    gates += _rz((delta - beta) / 2, t)
    gates.append(CX(c, t))
    # B = Ry(-gamma/2) Rz(-(delta + beta)/2)
    gates += _rz(-(delta + beta) / 2, t) + _ry(-gamma / 2, t)
    gates.append(CX(c, t))
    # A = Rz(beta) Ry(gamma/2)
    gates += _ry(gamma / 2, t) + _rz(beta, t)
    # P(t) = e^{it/2} Rz(t); the three substituted angles sum to zero and the
    # two Ry phases cancel, so only alpha is left, applied on the control.
    if abs(alpha) > 1e-15:
        gates.append(P(alpha, c))
    return gates


def _toffoli(c1: int, c2: int, t: int) -> list[Gate]:
    return [
        H(t),
        CX(c2, t), P(-QUARTER, t),
        CX(c1, t), P(QUARTER, t),
        CX(c2, t), P(-QUARTER, t),
        CX(c1, t), P(QUARTER, c2), P(QUARTER, t),
        H(t),
        CX(c1, c2), P(QUARTER, c1), P(-QUARTER, c2),
        CX(c1, c2),
    ]


def _cphase(angle: float, c: int, t: int) -> list[Gate]:
    return [P(angle / 2, c), CX(c, t), P(-angle / 2, t), CX(c, t), P(angle / 2, t)]


def _swap(a: int, b: int) -> list[Gate]:
    return [CX(a, b), CX(b, a), CX(a, b)]


@dataclass
class _AncillaPool:
    base: int
    used: int = 0

    def need(self, k: int) -> list[int]:
        self.used = max(self.used, k)
        return [self.base + i for i in range(k)]


def _and_ladder(controls: tuple[int, ...], anc: list[int]) -> list[Gate]:
    """Compute AND(controls) into anc[-1]; anc has len(controls) - 1 entries."""
    gates = [CCX(controls[0], controls[1], anc[0])]
    for i in range(2, len(controls)):
        gates.append(CCX(anc[i - 2], controls[i], anc[i - 1]))
    return gates


def _lower(g: Gate, pool: _AncillaPool, keep: Callable[[Gate], bool] | None = None) -> list[Gate]:
    if keep is not None and keep(g):
        return [g]
    k = len(g.controls)
    if g.name == "swap":
        if k:
            raise DecompositionError("controlled SWAP has no registered decomposition")
        return _swap(*g.targets)
    if g.name == "u" and len(g.targets) != 1:
        raise DecompositionError(f"no registered decomposition for {len(g.targets)}-qubit custom gate")

    t = g.targets[0]
    if k == 0:
        if g.name in ("h", "x", "p"):
            return [g if g.label is None else Gate(g.name, g.targets, angle=g.angle)]
        return _single_qubit(g.matrix(), t)
    if k == 1:
        c = g.controls[0]
        if g.name == "x":
            return [CX(c, t)]
        if g.name == "p":
            return _cphase(g.angle, c, t)
        return _controlled_single(g.matrix(), c, t)

    if g.name == "x":
        if k == 2:
            return _toffoli(g.controls[0], g.controls[1], t)
        anc = pool.need(k - 2)
        ladder = _and_ladder(g.controls[:-1], anc)
        core = [CCX(anc[-1], g.controls[-1], t)]
    else:
        anc = pool.need(k - 1)
        ladder = _and_ladder(g.controls, anc)
        core = [Gate(g.name, g.targets, (anc[-1],), angle=g.angle, unitary=g.unitary)]
    out: list[Gate] = []
    for h in ladder + core + list(reversed(ladder)):
        out += _lower(h, pool, keep)
    return out


def decompose_to_basis(circuit: Circuit, keep: Callable[[Gate], bool] | None = None) -> Circuit:
    """Rewrite into CX plus single-qubit H/X/R_phi gates, equal up to global phase.

    Gates for which ``keep`` returns true are passed through untouched, which
    lets emitters retain natively supported gates such as SWAP or CCX.
    """
    pool = _AncillaPool(base=circuit.num_qubits)
    gates: list[Gate] = []
    for g in circuit.gates:
        gates += _lower(g, pool, keep)
    register = circuit.register
    if pool.used:
        register = register.extend(Qubit("ancilla", i, "dec") for i in range(pool.used))
    return Circuit(register, tuple(gates))


@dataclass(frozen=True)
class GateCounts:
    """Counts on the decomposed circuit.

    ``depth`` counts every gate layer; ``two_qubit_depth`` counts only CX layers
    along the longest per-qubit dependency chain.
    """

    by_kind: dict[str, int] = field(default_factory=dict)
    two_qubit_count: int = 0
    single_qubit_count: int = 0
    phase_count: int = 0
    total: int = 0
    depth: int = 0
    two_qubit_depth: int = 0

    def as_dict(self) -> dict[str, int]:
        out = {f"count_{k}": v for k, v in sorted(self.by_kind.items())}
        out.update(
            two_qubit_count=self.two_qubit_count,
            single_qubit_count=self.single_qubit_count,
            phase_count=self.phase_count,
            total=self.total,
            depth=self.depth,
            two_qubit_depth=self.two_qubit_depth,
        )
        return out


def _layers(circuit: Circuit, weight) -> int:
    level = [0] * circuit.num_qubits
    for g in circuit.gates:
        qs = g.qubits
        d = max(level[q] for q in qs) + weight(g)
        for q in qs:
            level[q] = d
    return max(level, default=0)


def gate_counts(circuit: Circuit) -> GateCounts:
    dec = decompose_to_basis(circuit)
    kinds = Counter()
    for g in dec.gates:
        kinds["cx" if g.controls else g.name] += 1
    two = kinds.get("cx", 0)
    return GateCounts(
        by_kind=dict(kinds),
        two_qubit_count=two,
        single_qubit_count=len(dec.gates) - two,
        phase_count=kinds.get("p", 0),
        total=len(dec.gates),
        depth=_layers(dec, lambda g: 1),
        two_qubit_depth=_layers(dec, lambda g: 1 if g.controls else 0),
    )
