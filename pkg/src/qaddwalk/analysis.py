"""Walk observables: traces, average node, peaks, envelopes, curve fits, CSV."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .builders import WalkSpec, forbidden_states, initial_state, walk_parts
from .circuit import Circuit
from .statevector import Distribution, WalkState, apply_circuit


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class StepTrace:
    """Exact node distributions for steps 0..M.

    ``probabilities[i, n]`` is the probability of node ``n`` after ``i`` steps
    (joint index ``v * 2**N_H + h`` in 2D).  ``leaks[i]`` is the largest
    forbidden pre-shift amplitude seen during step ``i + 1``; it is empty for
    periodic walks.
    """

    dims: tuple[int, ...]
    probabilities: np.ndarray
    leaks: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norms: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def steps(self) -> int:
        return len(self.probabilities) - 1

    @property
    def num_nodes(self) -> int:
        return self.probabilities.shape[1]

    def distribution(self, step: int) -> Distribution:
        return Distribution(tuple(range(sum(self.dims))), self.probabilities[step])

    @property
    def average_nodes(self) -> np.ndarray:
        return self.probabilities @ np.arange(self.num_nodes)


def _split_at_probe(step: Circuit) -> tuple[Circuit, Circuit]:
    """Cut a bounded step right before its first QFT, i.e. before the shift."""
    starts = step.block_ranges("qft")
    cut = starts[0][0] if starts else len(step.gates)
    return (
        Circuit(step.register, step.gates[:cut]),
        Circuit(step.register, step.gates[cut:]),
    )


def trace_walk(spec: WalkSpec) -> StepTrace:
    prefix, step, suffix = walk_parts(spec)
    k_coin = 1 << spec.coin_qubits
    forbidden = forbidden_states(spec)
    bounded = bool(spec.boundaries)
    head, tail = _split_at_probe(step) if bounded else (step, None)

    def node_probs(s: WalkState) -> np.ndarray:
        return s.probabilities().reshape(spec.num_nodes, k_coin).sum(axis=1)

    state = apply_circuit(initial_state(spec), prefix)
    rows = [node_probs(apply_circuit(state, suffix))]
    leaks, norms = [], []
    for _ in range(spec.steps):
        if bounded:
            state = apply_circuit(state, head)
            amps = state.amplitudes.reshape(spec.num_nodes, k_coin)
            leaks.append(max((abs(amps[n, c]) for n, c in forbidden), default=0.0))
            state = apply_circuit(state, tail)
            out = state
        else:
            state = apply_circuit(state, step)
            out = apply_circuit(state, suffix)
        norms.append(out.norm)
        rows.append(node_probs(out))
    return StepTrace(spec.dims, np.array(rows), np.array(leaks), np.array(norms))


def average_node(dist: Distribution | Sequence[float]) -> float:
    p = np.asarray(dist.probabilities if isinstance(dist, Distribution) else dist, dtype=float)
    return float(np.arange(len(p)) @ p)


@dataclass(frozen=True)
class PeakStats:
    peak_step: int
    peak_avg_node: float
    peak_right_half_prob: float


def peak_stats(trace: StepTrace, window: int | None = None) -> PeakStats:
    """Earliest argmax of the average-node series over steps 0..window."""
    if trace.steps < 1:
        raise AnalysisError("peak statistics need at least one step")
    y = trace.average_nodes
    if window is not None:
        y = y[: window + 1]
    i = int(np.argmax(y))
    half = trace.num_nodes // 2
    return PeakStats(i, float(y[i]), float(trace.probabilities[i, half:].sum()))


def first_peak_window(num_node_qubits: int) -> int:
    """Steps covering the first rise and fall of a bounded 1D walk."""
    return 3 << (num_node_qubits - 1)


# -- envelopes --------------------------------------------------------------------


@dataclass(frozen=True)
class Envelopes:
    upper: np.ndarray  # step indices
    lower: np.ndarray

    def points(self, y: Sequence[float], which: str) -> tuple[np.ndarray, np.ndarray]:
        idx = self.upper if which == "upper" else self.lower
        return idx.astype(float), np.asarray(y, dtype=float)[idx]


def split_envelopes(series: Sequence[float] | StepTrace) -> Envelopes:
    """Upper: points >= every neighbour.  Lower: points <= every neighbour.

    A point equal to all its neighbours belongs to both; monotone interior
    points belong to neither.
    """
    y = np.asarray(series.average_nodes if isinstance(series, StepTrace) else series, dtype=float)
    if len(y) < 2:
        raise AnalysisError("envelope split needs at least two points")
    upper, lower = [], []
    for i in range(len(y)):
        nb = y[max(i - 1, 0): i + 2]
        nb = np.delete(nb, min(i, 1))
        if np.all(y[i] >= nb):
            upper.append(i)
        if np.all(y[i] <= nb):
            lower.append(i)
    return Envelopes(np.array(upper, dtype=int), np.array(lower, dtype=int))


# -- fits ----------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    """``parabola``: a x^2 + b x + c.  ``sinusoid``: A sin(w x + d) + B."""

    model: str
    params: dict[str, float]
    sigma: float
    n_points: int

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.model == "parabola":
            return (p["a"] * x + p["b"]) * x + p["c"]
        return p["A"] * np.sin(p["omega"] * x + p["delta"]) + p["B"]

    def residual_sigma(self, x, y) -> float:
        return rms(np.asarray(y, dtype=float) - self.predict(x))


def rms(residual: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(residual))))


def _points(x, y, need: int, what: str) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise AnalysisError("x and y must be 1D arrays of equal length")
    if len(np.unique(x)) < need:
        raise AnalysisError(f"{what} fit needs at least {need} distinct x values, got {len(np.unique(x))}")
    return x, y


def fit_parabola(x, y) -> FitResult:
    x, y = _points(x, y, 3, "parabola")
    design = np.column_stack([x * x, x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    a, b, c = (float(v) for v in coef)
    res = FitResult("parabola", {"a": a, "b": b, "c": c}, 0.0, len(x))
    return FitResult("parabola", res.params, res.residual_sigma(x, y), len(x))


def _linear_sinusoid(x: np.ndarray, y: np.ndarray, omega: float) -> tuple[float, np.ndarray]:
    design = np.column_stack([np.sin(omega * x), np.cos(omega * x), np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return rms(y - design @ coef), coef


def fit_sinusoid(
    x,
    y,
    omega0: float | None = None,
    bracket: tuple[float, float] | None = None,
    grid: int = 401,
) -> FitResult:
    """Least squares over A, d, B for each trial frequency w (closed form),
    a grid over ``bracket`` and bounded scalar refinement around the best
    grid point.  Default bracket is [w0 / 2, 2 w0] with w0 = pi / (2 x_peak)."""
    x, y = _points(x, y, 4, "sinusoid")
    if bracket is None:
        if omega0 is None:
            x_peak = x[int(np.argmax(y))]
            if x_peak <= 0:
                raise AnalysisError("cannot seed a frequency: data peaks at x <= 0")
            omega0 = math.pi / (2 * x_peak)
        bracket = (omega0 / 2, omega0 * 2)
    lo, hi = bracket
    if not 0 < lo < hi:
        raise AnalysisError(f"bad frequency bracket {bracket}")
    omegas = np.linspace(lo, hi, grid)
    sig = [_linear_sinusoid(x, y, w)[0] for w in omegas]
    k = int(np.argmin(sig))
    a, b = omegas[max(k - 1, 0)], omegas[min(k + 1, grid - 1)]
    best = minimize_scalar(
        lambda w: _linear_sinusoid(x, y, w)[0], bounds=(a, b), method="bounded",
        options={"xatol": 1e-12},
    )
    omega = float(best.x) if best.fun <= sig[k] else float(omegas[k])
    _, (s, c, offset) = _linear_sinusoid(x, y, omega)
    params = {
        "A": float(math.hypot(s, c)),
        "omega": omega,
        "delta": float(math.atan2(c, s)),
        "B": float(offset),
    }
    res = FitResult("sinusoid", params, 0.0, len(x))
    return FitResult("sinusoid", params, res.residual_sigma(x, y), len(x))


@dataclass(frozen=True)
class EnvelopeFits:
    window: int
    peak_step: int
    fits: dict[str, FitResult]  # keys like "upper.parabola"

    def gap(self, envelope: str) -> float:
        return self.fits[f"{envelope}.sinusoid"].sigma - self.fits[f"{envelope}.parabola"].sigma


WINDOWS = ("quarter", "half", "full")


def fit_window(peak_step: int, window: str, length: int) -> int:
    if window == "quarter":
        return peak_step
    if window == "half":
        return min(2 * peak_step, length - 1)
    if window == "full":
        return length - 1
    raise AnalysisError(f"unknown fit window {window!r}; choose from {WINDOWS}")


def fit_envelopes(series: Sequence[float] | StepTrace, window: str = "half") -> EnvelopeFits:
    """Parabola and sinusoid fits on each envelope of the average-node series.

    The series is cut at ``window`` (quarter: 0..peak, half: 0..2*peak).  The
    sinusoid's frequency is bracketed by the rise time: a quarter period
    between ``peak - 1`` and ``peak + 1`` steps.
    """
    y = np.asarray(series.average_nodes if isinstance(series, StepTrace) else series, dtype=float)
    peak = int(np.argmax(y))
    if peak < 2:
        raise AnalysisError("series peaks too early to fit")
    end = fit_window(peak, window, len(y))
    cut = y[: end + 1]
    env = split_envelopes(cut)
    bracket = (math.pi / (2 * (peak + 1)), math.pi / (2 * (peak - 1)))
    fits = {}
    for which in ("upper", "lower"):
        xs, ys = env.points(cut, which)
        fits[f"{which}.parabola"] = fit_parabola(xs, ys)
        fits[f"{which}.sinusoid"] = fit_sinusoid(xs, ys, bracket=bracket)
    return EnvelopeFits(end, peak, fits)


# -- export ----------------------------------------------------------------------


def fmt(value: float) -> str:
    return f"{value:.12g}"


def write_trace_csv(trace: StepTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if len(trace.dims) == 1:
            w.writerow(["step", "node", "probability"])
            for i, row in enumerate(trace.probabilities):
                for n, p in enumerate(row):
                    w.writerow([i, n, fmt(p)])
        else:
            nh = 1 << trace.dims[1]
            w.writerow(["step", "row", "col", "probability"])
            for i, row in enumerate(trace.probabilities):
                for n, p in enumerate(row):
                    w.writerow([i, n // nh, n % nh, fmt(p)])


def write_summary_csv(trace: StepTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "avg_node"])
        for i, y in enumerate(trace.average_nodes):
            w.writerow([i, fmt(y)])


def read_summary_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise AnalysisError(f"cannot read {path}: {exc.strerror}") from None
    if not rows or not {"step", "avg_node"} <= set(rows[0]):
        raise AnalysisError(f"{path}: expected header 'step,avg_node'")
    try:
        x = np.array([float(r["step"]) for r in rows])
        y = np.array([float(r["avg_node"]) for r in rows])
    except (TypeError, ValueError):
        raise AnalysisError(f"{path}: non-numeric value in summary CSV") from None
    return x, y


def report(items: dict[str, object]) -> str:
    """``key=value`` lines; floats use 12 significant digits."""
    lines = []
    for k, v in items.items():
        if isinstance(v, (float, np.floating)):
            v = fmt(float(v))
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def fit_items(prefix: str, fit: FitResult) -> dict[str, object]:
    out: dict[str, object] = {f"{prefix}.model": fit.model, f"{prefix}.points": fit.n_points}
    out.update({f"{prefix}.{k}": v for k, v in fit.params.items()})
    out[f"{prefix}.sigma"] = fit.sigma
    return out
