"""Circuit builders for adder-based coined walks.

Register layout: node qubits first (MSB first; in 2D the vertical subregister
precedes the horizontal one), then the coin qubit(s).  One-dimensional shift
convention: coin |0> moves +1, coin |1> moves -1.  Two-dimensional coin table
(first coin qubit is the more significant):

    |00> right (h + 1)    |10> left (h - 1)
    |01> up    (v + 1)    |11> down (v - 1)

Opposite directions differ only in the first coin qubit, so every reflective
boundary is a single controlled-X on that qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .circuit import (
    CP,
    Circuit,
    Gate,
    H,
    Register,
    U,
    X,
    adjoint,
    gates_circuit,
    is_unitary,
)
from .statevector import WalkState, apply_circuit, new_basis_state

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)

DIRECTIONS = ("right", "left", "up", "down")
DIRECTION_COIN = {"right": 0b00, "left": 0b10, "up": 0b01, "down": 0b11}
OPPOSITE = {"right": "left", "left": "right", "up": "down", "down": "up"}


class WalkSpecError(ValueError):
    pass


class BoundaryInitError(WalkSpecError):
    """Initial state feeds amplitude into a forbidden pre-shift state."""


CoinChoice = Union[str, np.ndarray, Sequence[np.ndarray]]
Initial = Union[str, tuple[int, int]]


@dataclass(frozen=True)
class BoundarySpec:
    """A forbidden edge set.

    kind ``line``: 1D edge between ``node`` and ``node + 1 (mod 2^N)``.
    kind ``single``: 2D node ``node=(v, h)`` with blocked ``directions``.
    kind ``global``: 2D line across a whole axis; ``axis="h"`` blocks horizontal
    moves between columns ``value`` and ``value + 1``, ``axis="v"`` blocks
    vertical moves between rows ``value`` and ``value + 1``.
    """

    kind: str
    node: int | tuple[int, int] = 0
    directions: frozenset[str] = frozenset()
    axis: str | None = None
    phase: float = 0.0
    reflection: tuple[tuple[complex, ...], ...] | None = None

    @classmethod
    def line(cls, b: int, phase: float = 0.0) -> "BoundarySpec":
        return cls("line", int(b), phase=phase)

    @classmethod
    def single(
        cls,
        v: int,
        h: int,
        directions: Iterable[str],
        phase: float = 0.0,
        reflection: np.ndarray | None = None,
    ) -> "BoundarySpec":
        dirs = frozenset(directions)
        bad = dirs - set(DIRECTIONS)
        if bad:
            raise WalkSpecError(f"unknown direction(s) {sorted(bad)}")
        if not 1 <= len(dirs) <= 3:
            raise WalkSpecError(
                f"single-state boundary needs 1..3 blocked directions, got {len(dirs)}"
            )
        refl = None
        if reflection is not None:
            m = np.asarray(reflection, dtype=np.complex128)
            if m.shape != (4, 4) or not is_unitary(m):
                raise WalkSpecError("reflection hook must be a 4x4 unitary on the coin space")
            refl = tuple(tuple(complex(x) for x in row) for row in m)
        return cls("single", (int(v), int(h)), dirs, phase=phase, reflection=refl)

    @classmethod
    def global_(cls, axis: str, value: int, phase: float = 0.0) -> "BoundarySpec":
        if axis not in ("h", "v"):
            raise WalkSpecError("global boundary axis must be 'h' or 'v'")
        return cls("global", int(value), axis=axis, phase=phase)


@dataclass(frozen=True)
class WalkSpec:
    dims: tuple[int, ...]
    steps: int = 1
    coin: CoinChoice = "hadamard"
    boundaries: tuple[BoundarySpec, ...] = ()
    initial: Initial = "uniform"
    strict_init: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if isinstance(self.coin, np.ndarray):
            object.__setattr__(self, "coin", _frozen_matrix(self.coin))
        self.validate()

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def node_qubits(self) -> int:
        return sum(self.dims)

    @property
    def num_nodes(self) -> int:
        return 1 << self.node_qubits

    @property
    def coin_qubits(self) -> int:
        return self.ndim

    def register(self) -> Register:
        if self.ndim == 1:
            return Register.walk_1d(self.dims[0])
        return Register.walk_2d(*self.dims)

    def with_steps(self, steps: int) -> "WalkSpec":
        return WalkSpec(self.dims, steps, self.coin, self.boundaries, self.initial, self.strict_init)

    def validate(self) -> None:
        if self.ndim not in (1, 2):
            raise WalkSpecError("walks are 1D or 2D")
        if any(d < 1 for d in self.dims):
            raise WalkSpecError("each dimension needs at least one node qubit")
        if self.steps < 0:
            raise WalkSpecError("steps must be non-negative")
        coin_matrix(self)  # raises on a bad coin
        for b in self.boundaries:
            if self.ndim == 1 and b.kind != "line":
                raise WalkSpecError("1D walks only take 'line' boundaries")
            if self.ndim == 2 and b.kind == "line":
                raise WalkSpecError("2D walks take 'single' or 'global' boundaries")
            if b.kind == "line" and not 0 <= b.node < self.num_nodes:
                raise WalkSpecError(f"boundary node {b.node} outside 0..{self.num_nodes - 1}")
            if b.kind == "single":
                v, h = b.node
                if not (0 <= v < 1 << self.dims[0] and 0 <= h < 1 << self.dims[1]):
                    raise WalkSpecError(f"boundary node {b.node} outside the grid")
            if b.kind == "global":
                size = 1 << self.dims[0 if b.axis == "v" else 1]
                if not 0 <= b.node < size:
                    raise WalkSpecError(f"global boundary value {b.node} outside 0..{size - 1}")
        if self.initial != "uniform":
            try:
                node, coin = self.initial
            except (TypeError, ValueError):
                raise WalkSpecError(f"bad initial state {self.initial!r}") from None
            if not 0 <= node < self.num_nodes or not 0 <= coin < 1 << self.coin_qubits:
                raise WalkSpecError(f"initial basis state {self.initial} out of range")


def _frozen_matrix(m) -> tuple[tuple[complex, ...], ...]:
    return tuple(tuple(complex(x) for x in row) for row in np.asarray(m))


def coin_matrix(spec: WalkSpec) -> np.ndarray:
    """Full coin-space unitary (2x2 in 1D, 4x4 in 2D)."""
    size = 1 << spec.coin_qubits
    coin = spec.coin
    if isinstance(coin, str):
        if coin.lower() != "hadamard":
            raise WalkSpecError(f"unknown coin {coin!r}")
        m = HADAMARD if spec.ndim == 1 else np.kron(HADAMARD, HADAMARD)
    else:
        arr = np.asarray(coin, dtype=np.complex128)
        if arr.shape == (2, 2, 2) and spec.ndim == 2:
            m = np.kron(arr[0], arr[1])
        else:
            m = arr
    if m.shape != (size, size):
        raise WalkSpecError(f"coin must be {size}x{size} for a {spec.ndim}D walk")
    if not is_unitary(m):
        raise WalkSpecError("coin operator is not unitary")
    return m


# -- Fourier transform and adder ---------------------------------------------


def _as_register(register: Register | int) -> Register:
    return Register.plain(register) if isinstance(register, int) else register


def qft(register: Register | int, qubits: Sequence[int] | None = None) -> Circuit:
    """QFT on ``qubits`` (default: all node qubits), terminal SWAPs included.

    ``unitary_of(qft(n))[j, k] == exp(2j*pi*j*k / 2**n) / sqrt(2**n)``.
    """
    reg = _as_register(register)
    qs = tuple(reg.nodes() if qubits is None else qubits)
    if not qs:
        raise WalkSpecError("qft needs at least one qubit")
    n = len(qs)
    gates: list[Gate] = []
    for j in range(n):
        gates.append(H(qs[j]))
        for k in range(j + 1, n):
            gates.append(CP(math.pi / 2 ** (k - j), qs[k], qs[j]))
    for i in range(n // 2):
        gates.append(Gate("swap", (qs[i], qs[n - 1 - i])))
    return gates_circuit(reg, gates, "qft")


def qft_dag(register: Register | int, qubits: Sequence[int] | None = None) -> Circuit:
    return adjoint(qft(register, qubits))


def qadd(
    register: Register | int,
    nodes: Sequence[int] | None = None,
    sign: int = +1,
    controls: Sequence[int] = (),
    within: Sequence[int] | None = None,
) -> Circuit:
    """Phase-space adder ladder.

    Between ``qft(within)`` and ``qft_dag(within)`` this adds ``sign * 2**(N-j)``
    mod ``2**N`` to the ``N``-qubit register ``within`` when every control is
    |1>, where ``nodes`` is the length-``j`` suffix of ``within`` the ladder
    touches.
    """
    reg = _as_register(register)
    nodes = tuple(reg.nodes() if nodes is None else nodes)
    if within is not None:
        within = tuple(within)
        if len(nodes) > len(within) or within[len(within) - len(nodes):] != nodes:
            raise WalkSpecError("adder subset must be a suffix of its dimension register")
    if sign not in (1, -1):
        raise WalkSpecError("sign must be +1 or -1")
    controls = tuple(controls)
    if set(controls) & set(nodes):
        raise WalkSpecError("adder controls overlap its targets")
    gates = [
        Gate("p", (q,), controls, angle=sign * math.pi / 2**i) for i, q in enumerate(nodes)
    ]
    return gates_circuit(reg, gates, "qadd+" if sign > 0 else "qadd-")


# -- coin ------------------------------------------------------------------


def _coin_gates(coins: Sequence[int], m: np.ndarray, label: str) -> list[Gate]:
    if len(coins) == 1:
        if np.allclose(m, HADAMARD, atol=0):
            return [H(coins[0])]
        return [U(m, coins, label=label)]
    if np.allclose(m, np.kron(HADAMARD, HADAMARD), atol=1e-15):
        return [H(coins[0]), H(coins[1])]
    return [U(m, coins, label=label)]


def coin_op(register: Register, coin: CoinChoice = "hadamard") -> Circuit:
    coins = register.coins()
    spec_like = WalkSpec((1,) * len(coins), coin=coin) if coins else None
    if spec_like is None:
        raise WalkSpecError("register has no coin qubits")
    m = coin_matrix(spec_like)
    return gates_circuit(register, _coin_gates(coins, m, "U_C"), "coin")


def _controlled(gates: Iterable[Gate], controls: Sequence[int]) -> list[Gate]:
    return [g.with_controls(controls) for g in gates]


def _coin_inverse_gates(register: Register, coin: CoinChoice) -> list[Gate]:
    return [g.inverse() for g in reversed(coin_op(register, coin).gates)]


def _x_transform(qubits: Sequence[int], value: int) -> list[Gate]:
    """X on every qubit whose bit in ``value`` is 0 (first qubit = MSB)."""
    n = len(qubits)
    return [X(q) for i, q in enumerate(qubits) if not (value >> (n - 1 - i)) & 1]


def _reflect_gate(coin: int, controls: Sequence[int], phase: float) -> Gate:
    if phase:
        m = np.exp(1j * phase) * np.array([[0, 1], [1, 0]], dtype=np.complex128)
        return U(m, (coin,), controls, label="U_B")
    return Gate("x", (coin,), tuple(controls))


# -- 1D --------------------------------------------------------------------


def _check_dims(spec: WalkSpec, ndim: int) -> None:
    if spec.ndim != ndim:
        raise WalkSpecError(f"expected a {ndim}D walk spec, got {spec.ndim}D")


def shift_1d(register: Register, in_phase_space: bool = True) -> Circuit:
    """Coin-|1> QADD-, then coin-|0> QADD+ (via X conjugation)."""
    nodes = register.nodes()
    (c,) = register.coins()
    xc = gates_circuit(register, [X(c)])
    body = (
        qadd(register, nodes, -1, (c,), within=nodes)
        + xc
        + qadd(register, nodes, +1, (c,), within=nodes)
        + xc
    ).labelled("shift")
    if in_phase_space:
        return body
    return qft(register, nodes) + body + qft_dag(register, nodes)


def coin_boundary_1d(register: Register, boundary: BoundarySpec, coin: CoinChoice = "hadamard") -> Circuit:
    nodes = register.nodes()
    (c,) = register.coins()
    size = 1 << len(nodes)
    if boundary.kind != "line" or not 0 <= boundary.node < size:
        raise WalkSpecError(f"boundary node {boundary.node} out of range for {size} nodes")
    undo = _coin_inverse_gates(register, coin)
    gates: list[Gate] = []
    for side in (boundary.node, (boundary.node + 1) % size):
        xt = _x_transform(nodes, side)
        gates += xt
        gates += _controlled(undo, nodes)
        gates.append(_reflect_gate(c, nodes, boundary.phase))
        gates += xt
    return gates_circuit(register, gates, "boundary")


def forbidden_states(spec: WalkSpec) -> list[tuple[int, int]]:
    """(node, coin) basis pairs that must carry no amplitude right before a shift."""
    if spec.ndim == 1:
        out = []
        for b in spec.boundaries:
            out += [(b.node, 0), ((b.node + 1) % spec.num_nodes, 1)]
        return sorted(set(out))
    blocked = blocked_directions(spec)
    nh = spec.dims[1]
    return sorted(
        ((v << nh) | h, DIRECTION_COIN[d]) for (v, h), dirs in blocked.items() for d in dirs
    )


def _check_initial(spec: WalkSpec, pre_shift: Circuit) -> None:
    state = apply_circuit(initial_state(spec), pre_shift)
    amps = state.amplitudes.reshape(spec.num_nodes, 1 << spec.coin_qubits)
    leak = max((abs(amps[n, c]) for n, c in forbidden_states(spec)), default=0.0)
    if leak > 1e-9:
        raise BoundaryInitError(
            f"initial state puts amplitude {leak:.3g} on a forbidden pre-shift state; "
            "the boundary cannot hold from this start"
        )


def core_walk_1d(spec: WalkSpec) -> Circuit:
    _check_dims(spec, 1)
    if spec.boundaries:
        raise WalkSpecError("core_walk_1d is for periodic walks; use bounded_walk_1d")
    prefix, step, suffix = walk_parts(spec)
    return prefix + step.repeat(spec.steps) + suffix


def bounded_walk_1d(spec: WalkSpec) -> Circuit:
    _check_dims(spec, 1)
    if not spec.boundaries:
        raise WalkSpecError("bounded_walk_1d needs at least one boundary")
    prefix, step, suffix = walk_parts(spec)
    return prefix + step.repeat(spec.steps) + suffix


# -- 2D --------------------------------------------------------------------


def _select_coin(coins: Sequence[int], value: int) -> list[Gate]:
    return _x_transform(coins, value)


def shift_2d(register: Register | WalkSpec, in_phase_space: bool = False) -> Circuit:
    """Four doubly-controlled adders, one per coin basis state.

    With ``in_phase_space=False`` the block is wrapped in per-subregister QFTs
    and acts on node-space states directly.
    """
    reg = register.register() if isinstance(register, WalkSpec) else register
    vq, hq = reg.nodes("V"), reg.nodes("H")
    coins = reg.coins()
    if not vq or not hq or len(coins) != 2:
        raise WalkSpecError("shift_2d needs V and H node subregisters and two coin qubits")
    parts = []
    for direction, sub, sign in (
        ("right", hq, +1),
        ("left", hq, -1),
        ("up", vq, +1),
        ("down", vq, -1),
    ):
        sel = gates_circuit(reg, _select_coin(coins, DIRECTION_COIN[direction]))
        parts.append(sel + qadd(reg, sub, sign, coins, within=sub) + sel)
    body = Circuit.concat(reg, parts).labelled("shift")
    if in_phase_space:
        return body
    return _qft_2d(reg) + body + _qft_dag_2d(reg)


def _qft_2d(reg: Register) -> Circuit:
    return qft(reg, reg.nodes("V")) + qft(reg, reg.nodes("H"))


def _qft_dag_2d(reg: Register) -> Circuit:
    return qft_dag(reg, reg.nodes("H")) + qft_dag(reg, reg.nodes("V"))


def _neighbor(spec: WalkSpec, v: int, h: int, d: str) -> tuple[int, int]:
    nv, nh = 1 << spec.dims[0], 1 << spec.dims[1]
    dv, dh = {"right": (0, 1), "left": (0, -1), "up": (1, 0), "down": (-1, 0)}[d]
    return (v + dv) % nv, (h + dh) % nh


def blocked_directions(spec: WalkSpec) -> dict[tuple[int, int], set[str]]:
    """Per-node blocked direction sets implied by every 2D boundary (both sides)."""
    blocked: dict[tuple[int, int], set[str]] = {}
    nv, nh = 1 << spec.dims[0], 1 << spec.dims[1]

    def add(node, d):
        blocked.setdefault(node, set()).add(d)

    for b in spec.boundaries:
        if b.kind == "single":
            v, h = b.node
            for d in b.directions:
                add((v, h), d)
                add(_neighbor(spec, v, h, d), OPPOSITE[d])
        elif b.kind == "global":
            if b.axis == "h":
                for v in range(nv):
                    add((v, b.node), "right")
                    add((v, (b.node + 1) % nh), "left")
            else:
                for h in range(nh):
                    add((b.node, h), "up")
                    add(((b.node + 1) % nv, h), "down")
    return blocked


def _reflector_block(
    reg: Register,
    controls: Sequence[int],
    value: int,
    coin: CoinChoice,
    phase: float,
    reflection,
) -> list[Gate]:
    coins = reg.coins()
    xt = _x_transform(controls, value)
    gates = list(xt)
    gates += _controlled(_coin_inverse_gates(reg, coin), controls)
    if reflection is not None:
        m = np.array(reflection, dtype=np.complex128) * np.exp(1j * phase)
        gates.append(U(m, coins, controls, label="U_B"))
    else:
        gates.append(_reflect_gate(coins[0], controls, phase))
    gates += xt
    return gates


def boundary_2d(
    register: Register,
    boundaries: BoundarySpec | Sequence[BoundarySpec],
    coin: CoinChoice = "hadamard",
    dims: tuple[int, int] | None = None,
) -> Circuit:
    """Undo the coin and flip the first coin qubit on every boundary-adjacent node.

    Global boundaries use a control chain on one subregister only; single-state
    boundaries control on the full node register.  A node touched by several
    boundaries gets one block.
    """
    if isinstance(boundaries, BoundarySpec):
        boundaries = (boundaries,)
    vq, hq = register.nodes("V"), register.nodes("H")
    dims = dims or (len(vq), len(hq))
    spec = WalkSpec(dims, 0, coin, tuple(boundaries), strict_init=False)
    nh = 1 << dims[1]
    nv = 1 << dims[0]
    gates: list[Gate] = []
    covered_cols: set[int] = set()
    covered_rows: set[int] = set()
    for b in spec.boundaries:
        if b.kind != "global":
            continue
        if b.axis == "h":
            lines, sub, cover = (b.node, (b.node + 1) % nh), hq, covered_cols
        else:
            lines, sub, cover = (b.node, (b.node + 1) % nv), vq, covered_rows
        for val in lines:
            if val in cover:
                continue
            cover.add(val)
            gates += _reflector_block(register, sub, val, coin, b.phase, None)
    singles = [b for b in spec.boundaries if b.kind == "single"]
    phase_of = {}
    refl_of = {}
    for b in singles:
        v, h = b.node
        for node in [(v, h)] + [_neighbor(spec, v, h, d) for d in b.directions]:
            phase_of.setdefault(node, b.phase)
            refl_of.setdefault(node, b.reflection)
    for (v, h) in sorted(phase_of):
        if h in covered_cols or v in covered_rows:
            continue
        gates += _reflector_block(
            register, vq + hq, (v << len(hq)) | h, coin, phase_of[(v, h)], refl_of[(v, h)]
        )
    return gates_circuit(register, gates, "boundary")


def walk_2d(spec: WalkSpec) -> Circuit:
    _check_dims(spec, 2)
    prefix, step, suffix = walk_parts(spec)
    return prefix + step.repeat(spec.steps) + suffix


# -- assembly ----------------------------------------------------------------


def walk_parts(spec: WalkSpec) -> tuple[Circuit, Circuit, Circuit]:
    """(prefix, step, suffix) with ``walk == prefix + step * M + suffix``.

    Periodic walks keep one QFT pair outside the loop; bounded walks carry a
    QFT pair inside every step.  Validates the initial state for bounded walks
    when ``spec.strict_init`` is set.
    """
    reg = spec.register()
    empty = Circuit(reg)
    coin = coin_op(reg, spec.coin)
    if spec.ndim == 1:
        if not spec.boundaries:
            nodes = reg.nodes()
            return qft(reg, nodes), coin + shift_1d(reg), qft_dag(reg, nodes)
        bnd = Circuit.concat(reg, (coin_boundary_1d(reg, b, spec.coin) for b in spec.boundaries))
        shift = shift_1d(reg, in_phase_space=False)
    else:
        if not spec.boundaries:
            return _qft_2d(reg), coin + shift_2d(reg, in_phase_space=True), _qft_dag_2d(reg)
        bnd = boundary_2d(reg, spec.boundaries, spec.coin, spec.dims)
        shift = shift_2d(reg, in_phase_space=False)
    if spec.strict_init:
        _check_initial(spec, coin + bnd)
    return empty, coin + bnd + shift, empty


def build_walk(spec: WalkSpec) -> Circuit:
    if spec.ndim == 1:
        return bounded_walk_1d(spec) if spec.boundaries else core_walk_1d(spec)
    return walk_2d(spec)


def initial_state(spec: WalkSpec) -> WalkState:
    n = spec.node_qubits + spec.coin_qubits
    if spec.initial == "uniform":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[:: 1 << spec.coin_qubits] = 1.0 / math.sqrt(spec.num_nodes)
        return WalkState(n, amps)
    node, c = spec.initial
    return new_basis_state(n, (node << spec.coin_qubits) | c)


def preparation(spec: WalkSpec) -> Circuit:
    """Gates taking |0...0> to :func:`initial_state`."""
    reg = spec.register()
    nodes, coins = reg.nodes(), reg.coins()
    if spec.initial == "uniform":
        return gates_circuit(reg, [H(q) for q in nodes], "prep")
    node, c = spec.initial
    gates = [X(q) for i, q in enumerate(nodes) if (node >> (len(nodes) - 1 - i)) & 1]
    gates += [X(q) for i, q in enumerate(coins) if (c >> (len(coins) - 1 - i)) & 1]
    return gates_circuit(reg, gates, "prep")


# -- hardware experiment compositions ----------------------------------------


def _parse_bits(initial: str | int, width: int) -> int:
    if isinstance(initial, str):
        if len(initial) != width or set(initial) - {"0", "1"}:
            raise WalkSpecError(f"expected a {width}-bit string, got {initial!r}")
        return int(initial, 2)
    if not 0 <= initial < 1 << width:
        raise WalkSpecError(f"initial state {initial} out of range")
    return int(initial)


def qft_roundtrip_experiment(initial: str | int = "000") -> Circuit:
    """Prepare a 3-bit node state, apply QFT then QFT^dag; coin idles in |0>."""
    reg = Register.walk_1d(3)
    nodes = reg.nodes()
    return roundtrip_prep(initial) + qft(reg, nodes) + qft_dag(reg, nodes)


def roundtrip_prep(initial: str | int) -> Circuit:
    reg = Register.walk_1d(3)
    value = _parse_bits(initial, 3)
    nodes = reg.nodes()
    return gates_circuit(reg, [X(q) for i, q in enumerate(nodes) if (value >> (2 - i)) & 1], "prep")


def shift_experiment(k: int) -> Circuit:
    """QFT, k coin-controlled QADD+ blocks, QFT^dag, starting from |000>|0>.

    The coin is excited to |1> only around the adder blocks and returned to
    |0> before the inverse transform.
    """
    reg = Register.walk_1d(3)
    nodes = reg.nodes()
    return qft(reg, nodes) + shift_experiment_core(k) + qft_dag(reg, nodes)


def shift_experiment_core(k: int) -> Circuit:
    """The phase-space part of :func:`shift_experiment` (coin excite, adders, coin return)."""
    if not 1 <= k <= 7:
        raise WalkSpecError("shift count must be in 1..7")
    reg = Register.walk_1d(3)
    nodes = reg.nodes()
    (c,) = reg.coins()
    flip = gates_circuit(reg, [X(c)], "coin_excite")
    adds = Circuit.concat(reg, (qadd(reg, nodes, +1, (c,), within=nodes) for _ in range(k)))
    return flip + adds + flip
