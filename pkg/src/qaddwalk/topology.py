"""Coupling graphs, layouts, and a greedy SWAP-inserting router.

Two maps are tracked for every routed circuit.  The *wire* map follows
physical SWAP gates only, so it says where each logical qubit's quantum
state physically sits.  The *semantic* map additionally absorbs SWAPs that
appear in the input circuit (e.g. the terminal QFT reordering) as free
relabels, so it says which physical qubit carries logical qubit ``i`` of the
abstract circuit's output.  Equivalence checks use the semantic map.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate, Register
from .statevector import WalkState, apply_circuit, fidelity, random_state


class RoutingError(ValueError):
    pass


Edge = tuple[int, int]


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class CouplingGraph:
    qubits: tuple[int, ...]
    edges: frozenset[Edge]
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(sorted(set(self.qubits))))
        object.__setattr__(self, "edges", frozenset(_edge(a, b) for a, b in self.edges))
        known = set(self.qubits)
        for a, b in self.edges:
            if a == b:
                raise RoutingError(f"self-loop on qubit {a}")
            if a not in known or b not in known:
                raise RoutingError(f"edge ({a}, {b}) references an unknown qubit")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], name: str = "custom") -> "CouplingGraph":
        edges = [(int(a), int(b)) for a, b in edges]
        qubits = {q for e in edges for q in e}
        return cls(tuple(qubits), frozenset(edges), name)

    @classmethod
    def from_edge_list(cls, text: str, name: str = "custom") -> "CouplingGraph":
        """Parse ``u v`` pairs, one per line; ``#`` starts a comment."""
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise RoutingError(f"line {lineno}: expected 'u v', got {raw!r}")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise RoutingError(f"line {lineno}: non-integer qubit id in {raw!r}") from None
        if not edges:
            raise RoutingError("edge list is empty")
        return cls.from_edges(edges, name)

    @classmethod
    def load(cls, path: str | Path) -> "CouplingGraph":
        p = Path(path)
        return cls.from_edge_list(p.read_text(encoding="utf-8"), name=p.stem)

    def to_edge_list(self) -> str:
        return "".join(f"{a} {b}\n" for a, b in sorted(self.edges))

    def __len__(self) -> int:
        return len(self.qubits)

    def has_edge(self, a: int, b: int) -> bool:
        return _edge(a, b) in self.edges

    def neighbors(self, q: int) -> tuple[int, ...]:
        return tuple(sorted({b if a == q else a for a, b in self.edges if q in (a, b)}))

    def degree(self, q: int) -> int:
        return len(self.neighbors(q))

    @property
    def max_degree(self) -> int:
        return max((self.degree(q) for q in self.qubits), default=0)

    def index(self, q: int) -> int:
        return self.qubits.index(q)

    def register(self) -> Register:
        return Register.physical(self.qubits)

    def shortest_path(self, a: int, b: int, avoid: Iterable[int] = ()) -> list[int]:
        """BFS path; neighbours are expanded in increasing id order, so the
        first-found path is the lexicographically smallest shortest path."""
        blocked = set(avoid) - {a, b}
        prev = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for v in self.neighbors(u):
                if v not in prev and v not in blocked:
                    prev[v] = u
                    queue.append(v)
        if b not in prev:
            raise RoutingError(f"physical qubits {a} and {b} are not connected")
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def distance(self, a: int, b: int) -> int:
        return len(self.shortest_path(a, b)) - 1

    def is_connected(self, qubits: Iterable[int]) -> bool:
        qs = set(qubits)
        if len(qs) <= 1:
            return True
        start = next(iter(qs))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in self.neighbors(u):
                if v in qs and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == qs

    def supports(self, qubits: Sequence[int]) -> bool:
        """A multi-qubit gate is legal when its qubits induce a connected subgraph."""
        return self.is_connected(qubits)


# Physical ids follow the 27-qubit Falcon numbering.
FALCON27_EDGES = (
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
    (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16),
    (15, 18), (16, 19), (17, 18), (18, 21), (19, 20), (19, 22), (21, 23),
    (22, 25), (23, 24), (24, 25), (25, 26),
)

PATCH_EDGES = ((4, 7), (6, 7), (7, 10), (10, 12), (12, 13), (13, 14), (11, 14), (14, 16))
SPARE_EDGE = (12, 15)


def junction() -> CouplingGraph:
    """Degree-3 center 0 with arms 1, 2, 3."""
    return CouplingGraph.from_edges([(0, 1), (0, 2), (0, 3)], "junction")


def heavy_hex_patch(spare: bool = True) -> CouplingGraph:
    """Two junctions (centers 7 and 14) joined by 10-12-13, plus spare 15 on 12."""
    edges = PATCH_EDGES + ((SPARE_EDGE,) if spare else ())
    return CouplingGraph.from_edges(edges, "heavy-hex" if spare else "heavy-hex-nospare")


def falcon27() -> CouplingGraph:
    return CouplingGraph.from_edges(FALCON27_EDGES, "falcon27")


PRESETS = {
    "junction": junction,
    "heavy-hex": heavy_hex_patch,
    "heavy-hex-nospare": lambda: heavy_hex_patch(spare=False),
    "falcon27": falcon27,
}


def load_graph(name_or_path: str) -> CouplingGraph:
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    return CouplingGraph.load(name_or_path)


# -- layout ----------------------------------------------------------------


@dataclass(frozen=True)
class Layout:
    """Logical -> physical placement plus its mutation log.

    Log entries are ``("swap", p, q)`` for a physical SWAP between physical
    ids ``p`` and ``q`` and ``("relabel", i, j)`` for a virtual exchange of
    logical qubits ``i`` and ``j``.
    """

    initial: tuple[int, ...]
    current: tuple[int, ...] = ()
    log: tuple[tuple[str, int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "initial", tuple(int(p) for p in self.initial))
        if not self.current:
            object.__setattr__(self, "current", self.initial)
        if len(set(self.initial)) != len(self.initial) or sorted(self.current) != sorted(self.initial):
            raise RoutingError("layout must be a bijection onto distinct physical qubits")

    @classmethod
    def trivial(cls, graph: CouplingGraph, n: int) -> "Layout":
        if n > len(graph):
            raise RoutingError(f"{n} logical qubits do not fit on {len(graph)} physical qubits")
        return cls(graph.qubits[:n])

    def __len__(self) -> int:
        return len(self.initial)

    def physical(self, logical: int) -> int:
        return self.current[logical]

    def logical_at(self, phys: int) -> int | None:
        try:
            return self.current.index(phys)
        except ValueError:
            return None

    def swap(self, p: int, q: int) -> "Layout":
        cur = list(self.current)
        for i, x in enumerate(cur):
            if x == p:
                cur[i] = q
            elif x == q:
                cur[i] = p
        return Layout(self.initial, tuple(cur), self.log + (("swap", p, q),))

    def relabel(self, i: int, j: int) -> "Layout":
        cur = list(self.current)
        cur[i], cur[j] = cur[j], cur[i]
        return Layout(self.initial, tuple(cur), self.log + (("relabel", i, j),))

    @staticmethod
    def _replay(start: tuple[int, ...], log, kinds) -> tuple[int, ...]:
        cur = list(start)
        for kind, a, b in log:
            if kind not in kinds:
                continue
            if kind == "swap":
                cur = [b if x == a else a if x == b else x for x in cur]
            else:
                cur[a], cur[b] = cur[b], cur[a]
        return tuple(cur)

    def replay(self) -> tuple[int, ...]:
        return self._replay(self.initial, self.log, ("swap", "relabel"))

    def wires(self) -> tuple[int, ...]:
        """Physical position of each logical qubit's state (physical SWAPs only)."""
        return self._replay(self.initial, self.log, ("swap",))

    def moved(self) -> tuple[int, ...]:
        """Logical qubits whose state sits somewhere other than where it started."""
        return tuple(i for i, (a, b) in enumerate(zip(self.initial, self.wires())) if a != b)

    def swap_count(self) -> int:
        return sum(1 for kind, *_ in self.log if kind == "swap")

    def at_home(self) -> bool:
        return self.current == self.initial and self.wires() == self.initial


# -- emitting onto hardware ----------------------------------------------------


@dataclass
class PhysicalEmitter:
    """Accumulates gates on a coupling graph while tracking a Layout.

    ``gate`` takes logical qubit indices and maps them through the current
    semantic layout; ``swap`` moves states between physical qubits.  Every
    multi-qubit gate is checked against the graph.
    """

    graph: CouplingGraph
    layout: Layout
    gates: list[Gate] = field(default_factory=list)

    def _phys_index(self, p: int) -> int:
        return self.graph.index(p)

    def _emit(self, g: Gate) -> None:
        if len(g.qubits) > 1:
            phys = [self.graph.qubits[i] for i in g.qubits]
            if not self.graph.supports(phys):
                raise RoutingError(f"gate {g.name} on physical {phys} is not supported by the coupling graph")
        self.gates.append(g)

    def gate(self, g: Gate) -> None:
        self._emit(g.remap({q: self._phys_index(self.layout.physical(q)) for q in g.qubits}))

    def physical_gate(self, g: Gate) -> None:
        """Emit a gate already expressed in physical ids."""
        self._emit(g.remap({q: self._phys_index(q) for q in g.qubits}))

    def swap(self, p: int, q: int) -> None:
        self._emit(Gate("swap", (self._phys_index(p), self._phys_index(q))))
        self.layout = self.layout.swap(p, q)

    def relabel(self, i: int, j: int) -> None:
        self.layout = self.layout.relabel(i, j)

    def where(self, logical: int) -> int:
        return self.layout.physical(logical)

    def circuit(self) -> Circuit:
        return Circuit(self.graph.register(), tuple(self.gates))


def swap_gates(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.name == "swap" and not g.controls)


def route_circuit(
    circuit: Circuit, graph: CouplingGraph, initial: Layout | None = None
) -> tuple[Circuit, Layout]:
    """Greedy router.

    Input SWAPs become relabels.  A gate whose qubits are not connected on the
    graph pulls each straggler along the lowest-id shortest path until it is
    adjacent to the qubits already gathered.
    """
    n = circuit.num_qubits
    layout = initial or Layout.trivial(graph, n)
    if len(layout) != n:
        raise RoutingError(f"layout covers {len(layout)} qubits, circuit has {n}")
    if any(p not in graph.qubits for p in layout.current):
        raise RoutingError("layout references qubits outside the coupling graph")
    em = PhysicalEmitter(graph, layout)
    for g in circuit.gates:
        if g.name == "swap" and not g.controls:
            em.relabel(*g.targets)
            continue
        qs = g.qubits
        if len(qs) > 1 and not graph.supports([em.where(q) for q in qs]):
            _gather(em, qs)
        em.gate(g)
    return em.circuit(), em.layout


def _gather(em: PhysicalEmitter, qs: Sequence[int]) -> None:
    graph = em.graph
    gathered = [em.where(qs[0])]
    for q in qs[1:]:
        here = em.where(q)
        if any(graph.has_edge(here, g) for g in gathered):
            gathered.append(here)
            continue
        paths = []
        for g in gathered:
            try:
                paths.append(graph.shortest_path(here, g, avoid=[x for x in gathered if x != g]))
            except RoutingError:
                continue
        if not paths:
            raise RoutingError(f"cannot bring physical qubit {here} next to {gathered}")
        path = min(paths, key=lambda p: (len(p), p))
        for a, b in zip(path[:-2], path[1:-1]):
            em.swap(a, b)
        gathered.append(path[-2])


def connectivity_requirements(circuit: Circuit) -> frozenset[Edge]:
    """Logical qubit pairs that share a multi-qubit gate."""
    pairs = set()
    for g in circuit.gates:
        for a, b in combinations(g.qubits, 2):
            pairs.add(_edge(a, b))
    return frozenset(pairs)


# -- checking routed circuits --------------------------------------------------


def embed_state(state: WalkState, placement: Sequence[int], graph: CouplingGraph) -> WalkState:
    """Place logical qubit ``i`` on physical ``placement[i]``; idle qubits in |0>."""
    n, total = state.num_qubits, len(graph)
    tensor = state.amplitudes.reshape((2,) * n)
    full = np.zeros((2,) * total, dtype=np.complex128)
    idx = [0] * total
    axes = [graph.index(p) for p in placement]
    for i, ax in enumerate(axes):
        idx[ax] = slice(None)
    # remaining logical axes land in ascending physical order; permute to match
    order = np.argsort(axes)
    full[tuple(idx)] = np.transpose(tensor, order)
    return WalkState(total, full.reshape(-1))


def extract_state(state: WalkState, placement: Sequence[int], graph: CouplingGraph) -> WalkState:
    """Inverse of :func:`embed_state`; the norm drops if idle qubits left |0>."""
    total = state.num_qubits
    tensor = state.amplitudes.reshape((2,) * total)
    axes = [graph.index(p) for p in placement]
    idx = [0] * total
    for ax in axes:
        idx[ax] = slice(None)
    sub = tensor[tuple(idx)]
    order = np.argsort(axes)
    out = np.transpose(sub, np.argsort(order))
    return WalkState(len(placement), out.reshape(-1))


def routed_fidelities(
    abstract: Circuit,
    routed: Circuit,
    layout: Layout,
    graph: CouplingGraph,
    trials: int = 20,
    seed: int = 7,
    clean: Sequence[int] = (),
) -> list[float]:
    """|<C psi | extract(R embed(psi))>|^2 over random logical states.

    Logical qubits listed in ``clean`` are ancillas: they start in |0> in
    every sample instead of being randomised.
    """
    n = abstract.num_qubits
    if n != len(layout):
        raise RoutingError("abstract circuit and layout disagree on the qubit count")
    rng = np.random.default_rng(seed)
    keep = np.ones(1 << n, dtype=bool)
    for q in clean:
        keep &= ((np.arange(1 << n) >> (n - 1 - q)) & 1) == 0
    out = []
    for _ in range(trials):
        amps = random_state(n, rng).amplitudes * keep
        psi = WalkState(n, amps / np.linalg.norm(amps))
        want = apply_circuit(psi, abstract)
        got = apply_circuit(embed_state(psi, layout.initial, graph), routed)
        out.append(fidelity(want, extract_state(got, layout.current, graph)))
    return out


def routed_equivalent(
    abstract: Circuit,
    routed: Circuit,
    layout: Layout,
    graph: CouplingGraph,
    tol: float = 1e-9,
    trials: int = 20,
    clean: Sequence[int] = (),
) -> bool:
    return min(routed_fidelities(abstract, routed, layout, graph, trials, clean=clean)) >= 1.0 - tol


def illegal_gates(circuit: Circuit, graph: CouplingGraph) -> list[Gate]:
    if circuit.register != graph.register():
        raise CircuitError("circuit is not expressed on this graph's physical register")
    return [
        g for g in circuit.gates
        if len(g.qubits) > 1 and not graph.supports([graph.qubits[i] for i in g.qubits])
    ]
