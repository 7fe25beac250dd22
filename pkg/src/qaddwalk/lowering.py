"""Hand-written hardware templates.

* ``lower_qft3_junction``: three-qubit QFT on a degree-3 junction with two
  physical SWAPs, leaving the coin on the center.
* ``lower_walk2d_single_ancilla`` / ``lower_walk2d_dual_ancilla``: 3x3-qubit
  2D walk on a two-junction heavy-hex patch, shuttling the Toffoli ancilla
  (or a pair of them) between the subsystems.

Logical register for the 2D templates is ``walk_2d(3, 3)`` followed by the
ancilla qubit(s), so logical indices are: V nodes 0-2, H nodes 3-5, coins
6-7, ancillas 8 (and 9).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .builders import (
    DIRECTION_COIN,
    WalkSpec,
    _qft_2d,
    _qft_dag_2d,
    coin_op,
    initial_state,
    shift_2d,
)
from .circuit import CCX, CP, Circuit, Gate, H, Qubit, Register, X
from .statevector import WalkState, apply_circuit, marginal_distribution
from .topology import (
    CouplingGraph,
    Layout,
    PhysicalEmitter,
    RoutingError,
    embed_state,
    extract_state,
    junction,
)


class LoweringError(RoutingError):
    pass


# -- junction QFT ---------------------------------------------------------------


def _junction_center(graph: CouplingGraph) -> int:
    centers = [q for q in graph.qubits if graph.degree(q) == 3]
    if not centers:
        raise LoweringError("coupling graph has no degree-3 junction")
    return centers[0]


def _qft3_on_junction(em: PhysicalEmitter, q1: int, q2: int, q3: int, coin: int | None) -> None:
    """Emit QFT on logical (q1, q2, q3); q1 must sit on the junction center.

    The final reorder SWAP(q1, q3) of the textbook circuit is absorbed as a
    relabel.  If ``coin`` is given it is moved onto the center at the end.
    """
    center = em.where(q1)
    em.gate(H(q1))
    em.gate(CP(math.pi / 2, q2, q1))
    em.gate(CP(math.pi / 4, q3, q1))
    em.gate(H(q2))
    em.swap(center, em.where(q2))  # q2 to the center, next to q3
    em.gate(CP(math.pi / 2, q3, q2))
    em.gate(H(q3))
    em.relabel(q1, q3)
    if coin is not None:
        em.swap(em.where(coin), center)


def lower_qft3_junction(
    layout: Layout | None = None, graph: CouplingGraph | None = None
) -> tuple[Circuit, Layout]:
    """Routed QFT on nodes 0-2 of ``walk_1d(3)`` with the coin (logical 3)
    parked on a junction arm.  Default layout: Q1 center, Q2/Q3/QC on arms."""
    graph = graph or junction()
    center = _junction_center(graph)
    arms = graph.neighbors(center)
    layout = layout or Layout((center,) + arms[:3])
    if len(layout) != 4:
        raise LoweringError("junction QFT lowers exactly 3 node qubits and 1 coin")
    if layout.current[0] != center or set(layout.current[1:]) != set(arms[:3]):
        raise LoweringError("layout must put Q1 on the junction center and Q2, Q3, QC on its arms")
    em = PhysicalEmitter(graph, layout)
    _qft3_on_junction(em, 0, 1, 2, coin=3)
    return em.circuit(), em.layout


def lower_adjoint(routed: Circuit, layout: Layout, graph: CouplingGraph | None = None) -> tuple[Circuit, Layout]:
    """Adjoint of a routed circuit, continuing ``layout`` by unwinding its log.

    Applied after the routed QFT this returns every qubit to where it started.
    """
    graph = graph or junction()
    em = PhysicalEmitter(graph, layout)
    _unwind(em, [g.remap(list(range(routed.num_qubits))) for g in routed.gates], layout.log)
    return em.circuit(), em.layout


# -- 2D patch -------------------------------------------------------------------

V_SITES = (7, 4, 6)  # center first
H_SITES = (14, 11, 16)
C_V, C_A, C_H, SPARE = 10, 12, 13, 15
V_NODES, H_NODES, COIN0, COIN1, ANC1, ANC2 = (0, 1, 2), (3, 4, 5), 6, 7, 8, 9


def lowered_register(ancillas: int) -> Register:
    return Register.walk_2d(3, 3).extend(Qubit("ancilla", i) for i in range(ancillas))


def _check_patch(graph: CouplingGraph, need_spare: bool) -> None:
    needed = {(4, 7), (6, 7), (7, 10), (10, 12), (12, 13), (13, 14), (11, 14), (14, 16)}
    if need_spare:
        needed.add((12, 15))
    missing = sorted(e for e in needed if not graph.has_edge(*e))
    if missing:
        what = "the spare qubit next to the ancilla" if missing == [(12, 15)] else f"edges {missing}"
        raise LoweringError(f"coupling graph lacks {what}")


def _check_spec(spec: WalkSpec) -> None:
    if spec.dims != (3, 3):
        raise LoweringError("2D templates are laid out for 3 vertical and 3 horizontal node qubits")
    if spec.boundaries:
        raise LoweringError("2D templates cover periodic walks only")


def patch_layout(ancillas: int) -> Layout:
    return Layout(V_SITES + H_SITES + (C_V, C_H, C_A) + ((SPARE,) if ancillas == 2 else ()))


_DIRECTION_PLAN = {
    "right": (H_NODES, +1),
    "left": (H_NODES, -1),
    "up": (V_NODES, +1),
    "down": (V_NODES, -1),
}


def _select(em: PhysicalEmitter, direction: str) -> None:
    value = DIRECTION_COIN[direction]
    for bit, coin in ((1, COIN0), (0, COIN1)):
        if not (value >> bit) & 1:
            em.gate(X(coin))


def _and_into(em: PhysicalEmitter, direction: str, anc: int) -> None:
    _select(em, direction)
    em.gate(CCX(COIN0, COIN1, anc))
    _select(em, direction)


def _qadd_from(em: PhysicalEmitter, anc: int, direction: str) -> None:
    nodes, sign = _DIRECTION_PLAN[direction]
    for i, q in enumerate(nodes):
        em.gate(CP(sign * math.pi / 2**i, anc, q))


def _coin(em: PhysicalEmitter, spec: WalkSpec) -> None:
    reg = Register.walk_2d(3, 3)
    for g in coin_op(reg, spec.coin).gates:
        em.gate(g)


def _route_qfts(em: PhysicalEmitter) -> None:
    _qft3_on_junction(em, *V_NODES, coin=None)
    _qft3_on_junction(em, *H_NODES, coin=None)


def _unwind(em: PhysicalEmitter, gates: list[Gate], log) -> None:
    for g in reversed(gates):
        em._emit(g.inverse())
    for kind, a, b in reversed(log):
        em.layout = em.layout.swap(a, b) if kind == "swap" else em.layout.relabel(a, b)


def _with_qfts(em: PhysicalEmitter, body) -> tuple[Circuit, Layout]:
    n0, log0 = len(em.gates), len(em.layout.log)
    _route_qfts(em)
    qft_gates, qft_log = em.gates[n0:], em.layout.log[log0:]
    after_qft = em.layout.current
    body()
    if em.layout.current != after_qft:
        raise LoweringError("step template did not restore the post-QFT placement")
    _unwind(em, qft_gates, qft_log)
    return em.circuit(), em.layout


def lower_walk2d_single_ancilla(
    spec: WalkSpec, graph: CouplingGraph, layout: Layout | None = None, include_qft: bool = True
) -> tuple[Circuit, Layout]:
    """One ancilla C_A on qubit 12 carries the coin AND to each junction.

    Per direction: X-select, CCX(C_V, C_H -> C_A), two SWAPs out to the
    subsystem center, QADD from C_A, two SWAPs back, CCX to uncompute.
    """
    _check_spec(spec)
    _check_patch(graph, need_spare=False)
    em = PhysicalEmitter(graph, layout or patch_layout(1))
    if em.layout.current != patch_layout(1).current:
        raise LoweringError("single-ancilla template expects the standard patch placement")

    def body() -> None:
        for _ in range(spec.steps):
            _coin(em, spec)
            for direction in ("right", "left", "up", "down"):
                route = (C_V, V_SITES[0]) if direction in ("up", "down") else (C_H, H_SITES[0])
                _and_into(em, direction, ANC1)
                em.swap(C_A, route[0])
                em.swap(route[0], route[1])
                _qadd_from(em, ANC1, direction)
                em.swap(route[0], route[1])
                em.swap(C_A, route[0])
                _and_into(em, direction, ANC1)

    if include_qft:
        return _with_qfts(em, body)
    body()
    return em.circuit(), em.layout


def lower_walk2d_dual_ancilla(
    spec: WalkSpec, graph: CouplingGraph, layout: Layout | None = None, include_qft: bool = True
) -> tuple[Circuit, Layout]:
    """Two ancillas: A1 serves the vertical junction, A2 the horizontal one.

    Setup moves the coins next to both ancillas (C_V to the spare 15, C_H to
    12, A1 to 10, A2 to 13); each ancilla then needs a single SWAP to reach
    its junction center, and the two adders run side by side.  Teardown
    reverses the setup so the final layout matches the single-ancilla one.
    """
    _check_spec(spec)
    _check_patch(graph, need_spare=True)
    em = PhysicalEmitter(graph, layout or patch_layout(2))
    if em.layout.current != patch_layout(2).current:
        raise LoweringError("dual-ancilla template expects the standard patch placement")
    setup = ((C_V, C_A), (C_A, SPARE), (C_A, C_H))

    def body() -> None:
        for p, q in setup:
            em.swap(p, q)
        a1_home, a2_home = em.where(ANC1), em.where(ANC2)
        for _ in range(spec.steps):
            _coin(em, spec)
            for vdir, hdir in (("up", "right"), ("down", "left")):
                _and_into(em, vdir, ANC1)
                _and_into(em, hdir, ANC2)
                em.swap(a1_home, V_SITES[0])
                em.swap(a2_home, H_SITES[0])
                _qadd_from(em, ANC1, vdir)
                _qadd_from(em, ANC2, hdir)
                em.swap(a1_home, V_SITES[0])
                em.swap(a2_home, H_SITES[0])
                _and_into(em, vdir, ANC1)
                _and_into(em, hdir, ANC2)
        for p, q in reversed(setup):
            em.swap(p, q)

    if include_qft:
        return _with_qfts(em, body)
    body()
    return em.circuit(), em.layout


def abstract_walk2d(spec: WalkSpec, ancillas: int, include_qft: bool = True) -> Circuit:
    """The unrouted walk on the lowered logical register (ancillas idle)."""
    reg = Register.walk_2d(3, 3)
    step = coin_op(reg, spec.coin) + shift_2d(reg, in_phase_space=True)
    body = step.repeat(spec.steps)
    if include_qft:
        body = _qft_2d(reg) + body + _qft_dag_2d(reg)
    return body.with_register(lowered_register(ancillas))


@dataclass(frozen=True)
class LoweredWalk:
    strategy: str
    circuit: Circuit
    layout: Layout
    graph: CouplingGraph
    ancillas: int

    def node_distribution(self, spec: WalkSpec) -> np.ndarray:
        """Simulate from ``spec.initial`` and return the joint node distribution."""
        psi = initial_state(spec)
        extra = np.zeros(1 << self.ancillas)
        extra[0] = 1.0
        full = WalkState(psi.num_qubits + self.ancillas, np.kron(psi.amplitudes, extra))
        out = apply_circuit(embed_state(full, self.layout.initial, self.graph), self.circuit)
        logical = extract_state(out, self.layout.current, self.graph)
        return marginal_distribution(logical, V_NODES + H_NODES).probabilities


def lower_walk2d(
    spec: WalkSpec, strategy: str, graph: CouplingGraph, include_qft: bool = True
) -> LoweredWalk:
    if strategy == "single":
        circ, lay = lower_walk2d_single_ancilla(spec, graph, include_qft=include_qft)
        return LoweredWalk("single", circ, lay, graph, 1)
    if strategy == "dual":
        circ, lay = lower_walk2d_dual_ancilla(spec, graph, include_qft=include_qft)
        return LoweredWalk("dual", circ, lay, graph, 2)
    raise LoweringError(f"unknown strategy {strategy!r} (expected 'single' or 'dual')")


def transport_swaps_per_shift(circuit: Circuit, steps: int) -> float:
    """SWAPs in a QFT-free single-ancilla lowering divided by directional shifts."""
    count = sum(1 for g in circuit.gates if g.name == "swap")
    return count / (4 * steps) if steps else 0.0


def lower_junction_experiment(prep: Circuit, middle: Circuit, graph: CouplingGraph | None = None) -> tuple[Circuit, Layout]:
    """Route ``prep + QFT + middle + QFT^dag`` over ``walk_1d(3)`` onto a junction.

    ``middle`` may only couple the coin to node qubits: after the routed QFT
    the coin sits on the center, adjacent to all three nodes.
    """
    graph = graph or junction()
    center = _junction_center(graph)
    em = PhysicalEmitter(graph, Layout((center,) + graph.neighbors(center)[:3]))
    for g in prep.gates:
        em.gate(g)
    n0, log0 = len(em.gates), len(em.layout.log)
    _qft3_on_junction(em, 0, 1, 2, coin=3)
    qft_gates, qft_log = em.gates[n0:], em.layout.log[log0:]
    for g in middle.gates:
        em.gate(g)
    _unwind(em, qft_gates, qft_log)
    return em.circuit(), em.layout
