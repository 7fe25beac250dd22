"""Gate and circuit IR.

A :class:`Circuit` is an immutable gate list over a role-labelled
:class:`Register`.  Roles (``node``/``coin``/``ancilla``/``physical``) and the
per-dimension tag on node qubits let builders and routers find subsystems
without positional conventions.  Named index ranges (:class:`Block`) record
where builder sub-circuits landed, e.g. ``"qft"`` or ``"boundary"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .statevector import UNITARY_TOL, apply_gate_inplace

TWO_PI = 2.0 * math.pi
MAX_UNITARY_QUBITS = 10

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


class CircuitError(ValueError):
    pass


class Qubit(NamedTuple):
    role: str
    index: int
    dim: str | None = None

    def __str__(self) -> str:
        prefix = {"node": "n", "coin": "c", "ancilla": "a", "physical": "p"}.get(self.role, self.role)
        return f"{prefix}{self.dim or ''}{self.index}"


@dataclass(frozen=True)
class Register:
    qubits: tuple[Qubit, ...]

    def __post_init__(self) -> None:
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError("register contains duplicate qubit labels")

    def __len__(self) -> int:
        return len(self.qubits)

    def __iter__(self) -> Iterator[Qubit]:
        return iter(self.qubits)

    def __getitem__(self, i: int) -> Qubit:
        return self.qubits[i]

    def index(self, q: Qubit) -> int:
        return self.qubits.index(q)

    def find(self, role: str, dim: str | None = None) -> tuple[int, ...]:
        return tuple(
            i for i, q in enumerate(self.qubits)
            if q.role == role and (dim is None or q.dim == dim)
        )

    def nodes(self, dim: str | None = None) -> tuple[int, ...]:
        return self.find("node", dim)

    def coins(self) -> tuple[int, ...]:
        return self.find("coin")

    def ancillas(self) -> tuple[int, ...]:
        return self.find("ancilla")

    def extend(self, extra: Iterable[Qubit]) -> "Register":
        return Register(self.qubits + tuple(extra))

    def labels(self) -> list[str]:
        return [str(q) for q in self.qubits]

    @classmethod
    def plain(cls, n: int) -> "Register":
        return cls(tuple(Qubit("node", i) for i in range(n)))

    @classmethod
    def walk_1d(cls, node_qubits: int) -> "Register":
        return cls(tuple(Qubit("node", i) for i in range(node_qubits)) + (Qubit("coin", 0),))

    @classmethod
    def walk_2d(cls, v_qubits: int, h_qubits: int) -> "Register":
        return cls(
            tuple(Qubit("node", i, "V") for i in range(v_qubits))
            + tuple(Qubit("node", i, "H") for i in range(h_qubits))
            + (Qubit("coin", 0), Qubit("coin", 1))
        )

    @classmethod
    def physical(cls, ids: Sequence[int]) -> "Register":
        return cls(tuple(Qubit("physical", int(i)) for i in ids))


def normalize_angle(angle: float) -> float:
    """Map to (-2pi, 2pi]."""
    a = math.fmod(float(angle), TWO_PI)
    if a <= -TWO_PI:
        a += TWO_PI
    return a


def _freeze(m: np.ndarray) -> tuple[tuple[complex, ...], ...]:
    return tuple(tuple(complex(v) for v in row) for row in np.asarray(m))


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol, rtol=0.0))


@dataclass(frozen=True)
class Gate:
    """One gate.  ``name`` is one of ``h``, ``x``, ``p`` (phase R_phi),
    ``swap`` or ``u`` (custom unitary).  Controls always fire on |1>."""

    name: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None
    unitary: tuple[tuple[complex, ...], ...] | None = None
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if set(self.targets) & set(self.controls):
            raise CircuitError(f"{self.name}: controls {self.controls} overlap targets {self.targets}")
        qs = self.qubits
        if len(set(qs)) != len(qs):
            raise CircuitError(f"{self.name}: duplicate qubits {qs}")
        arity = {"h": 1, "x": 1, "p": 1, "swap": 2}
        if self.name in arity:
            if len(self.targets) != arity[self.name]:
                raise CircuitError(f"{self.name} expects {arity[self.name]} target(s)")
        elif self.name == "u":
            if self.unitary is None:
                raise CircuitError("custom gate needs a matrix")
            m = np.array(self.unitary, dtype=np.complex128)
            if m.shape != (1 << len(self.targets),) * 2:
                raise CircuitError("custom matrix size does not match target count")
            if not is_unitary(m):
                raise CircuitError("custom gate matrix is not unitary")
        else:
            raise CircuitError(f"unknown gate kind {self.name!r}")
        if self.name == "p":
            if self.angle is None:
                raise CircuitError("phase gate needs an angle")
            object.__setattr__(self, "angle", normalize_angle(self.angle))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def arity(self) -> int:
        return len(self.targets) + len(self.controls)

    def matrix(self) -> np.ndarray:
        """Target-space matrix (controls excluded)."""
        if self.name == "h":
            return _H
        if self.name == "x":
            return _X
        if self.name == "p":
            return np.diag([1.0, np.exp(1j * self.angle)]).astype(np.complex128)
        if self.name == "swap":
            return _SWAP
        return np.array(self.unitary, dtype=np.complex128)

    def inverse(self) -> "Gate":
        if self.name == "p":
            return Gate("p", self.targets, self.controls, angle=-self.angle, label=self.label)
        if self.name == "u":
            inv = np.array(self.unitary, dtype=np.complex128).conj().T
            return Gate("u", self.targets, self.controls, unitary=_freeze(inv), label=_adjoint_label(self.label))
        return self

    def remap(self, mapping: Sequence[int] | dict[int, int]) -> "Gate":
        return Gate(
            self.name,
            tuple(mapping[t] for t in self.targets),
            tuple(mapping[c] for c in self.controls),
            angle=self.angle,
            unitary=self.unitary,
            label=self.label,
        )

    def with_controls(self, extra: Sequence[int]) -> "Gate":
        return Gate(self.name, self.targets, tuple(extra) + self.controls, self.angle, self.unitary, self.label)

    def __str__(self) -> str:
        base = {"x": "x", "h": "h", "p": "p", "swap": "swap", "u": self.label or "u"}[self.name]
        if self.controls:
            base = "c" * len(self.controls) + base if len(self.controls) <= 2 else f"mc{len(self.controls)}{base}"
        arg = f"({self.angle:.6g})" if self.name == "p" else ""
        return f"{base}{arg} {','.join(map(str, self.qubits))}"


# convenience constructors


def H(q: int) -> Gate:
    return Gate("h", (q,))


def X(q: int) -> Gate:
    return Gate("x", (q,))


def CX(c: int, t: int) -> Gate:
    return Gate("x", (t,), (c,))


def CCX(c1: int, c2: int, t: int) -> Gate:
    return Gate("x", (t,), (c1, c2))


def MCX(controls: Sequence[int], t: int) -> Gate:
    return Gate("x", (t,), tuple(controls))


def P(angle: float, q: int) -> Gate:
    return Gate("p", (q,), angle=angle)


def CP(angle: float, c: int, t: int) -> Gate:
    return Gate("p", (t,), (c,), angle=angle)


def SWAP(a: int, b: int) -> Gate:
    return Gate("swap", (a, b))


def U(matrix: np.ndarray, targets: Sequence[int], controls: Sequence[int] = (), label: str | None = None) -> Gate:
    return Gate("u", tuple(targets), tuple(controls), unitary=_freeze(matrix), label=label)


_ADJ_LABELS = {"qft": "qft_dag", "qft_dag": "qft", "qadd+": "qadd-", "qadd-": "qadd+"}


def _adjoint_label(label: str | None) -> str | None:
    if label is None:
        return None
    if label in _ADJ_LABELS:
        return _ADJ_LABELS[label]
    return label[:-4] if label.endswith("_dag") else label + "_dag"


@dataclass(frozen=True)
class Block:
    label: str
    start: int
    stop: int


@dataclass(frozen=True)
class Circuit:
    register: Register
    gates: tuple[Gate, ...] = ()
    blocks: tuple[Block, ...] = field(default=(), compare=True)

    def __post_init__(self) -> None:
        if isinstance(self.register, int):
            object.__setattr__(self, "register", Register.plain(self.register))
        object.__setattr__(self, "gates", tuple(self.gates))
        n = len(self.register)
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < n:
                    raise CircuitError(f"gate {g} references qubit {q} outside {n}-qubit register")

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.register != self.register:
            raise CircuitError("cannot concatenate circuits over different registers")
        off = len(self.gates)
        shifted = tuple(Block(b.label, b.start + off, b.stop + off) for b in other.blocks)
        return Circuit(self.register, self.gates + other.gates, self.blocks + shifted)

    def labelled(self, label: str) -> "Circuit":
        """Same gates with one extra block spanning the whole circuit."""
        return Circuit(self.register, self.gates, (Block(label, 0, len(self.gates)),) + self.blocks)

    def count_blocks(self, label: str) -> int:
        return sum(1 for b in self.blocks if b.label == label)

    def block_ranges(self, label: str) -> list[tuple[int, int]]:
        return sorted((b.start, b.stop) for b in self.blocks if b.label == label)

    def repeat(self, times: int) -> "Circuit":
        out = Circuit(self.register)
        for _ in range(times):
            out = out + self
        return out

    @classmethod
    def concat(cls, register: Register, parts: Iterable["Circuit"]) -> "Circuit":
        out = cls(register)
        for p in parts:
            out = out + p
        return out

    def with_register(self, register: Register) -> "Circuit":
        """Re-home onto a register that starts with this one (extra qubits idle)."""
        if register.qubits[: self.num_qubits] != self.register.qubits:
            raise CircuitError("new register must extend the current one")
        return Circuit(register, self.gates, self.blocks)

    def remap(self, register: Register, mapping: Sequence[int] | dict[int, int]) -> "Circuit":
        return Circuit(register, tuple(g.remap(mapping) for g in self.gates), self.blocks)

    def __str__(self) -> str:
        head = " ".join(self.register.labels())
        return "\n".join([f"circuit[{head}]"] + [f"  {g}" for g in self.gates])


def gates_circuit(register: Register | int, gates: Iterable[Gate], label: str | None = None) -> Circuit:
    c = Circuit(register, tuple(gates))
    return c.labelled(label) if label else c


def adjoint(circuit: Circuit) -> Circuit:
    n = len(circuit.gates)
    gates = tuple(g.inverse() for g in reversed(circuit.gates))
    blocks = tuple(
        Block(_adjoint_label(b.label), n - b.stop, n - b.start) for b in reversed(circuit.blocks)
    )
    return Circuit(circuit.register, gates, blocks)


def unitary_of(circuit: Circuit) -> np.ndarray:
    n = circuit.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise CircuitError(f"unitary_of is limited to {MAX_UNITARY_QUBITS} qubits (got {n})")
    arr = np.eye(1 << n, dtype=np.complex128)
    for g in circuit.gates:
        apply_gate_inplace(arr, n, g)
    return arr


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i t} b| after aligning the global phase on the largest entry of b."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise CircuitError("shape mismatch")
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) < 1e-12:
        return float(np.max(np.abs(a)))
    phase = a[k] / b[k]
    if abs(phase) < 1e-12:
        return float(np.max(np.abs(a - b)))
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))


def equivalent(a: Circuit, b: Circuit, atol: float = UNITARY_TOL, up_to_phase: bool = True) -> bool:
    """Unitary equivalence.  If ``b`` has extra trailing qubits they are treated
    as clean ancillas: compared on the subspace where they start and end in |0>."""
    ua = unitary_of(a)
    ub = unitary_of(b)
    extra = b.num_qubits - a.num_qubits
    if extra < 0:
        return equivalent(b, a, atol, up_to_phase)
    if extra:
        if b.register.qubits[: a.num_qubits] != a.register.qubits:
            raise CircuitError("ancilla-extended register must start with the reference register")
        idx = np.arange(1 << a.num_qubits) << extra
        ub = ub[np.ix_(idx, idx)]
    if up_to_phase:
        return global_phase_distance(ub, ua) <= atol
    return bool(np.allclose(ua, ub, atol=atol, rtol=0.0))
