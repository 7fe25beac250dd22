"""Command-line front end.

Exit codes: 0 success, 1 domain or validation error, 2 usage error.
Output goes to ``--out``, else ``$QADDWALK_OUT``, else ``./qaddwalk-out``.
Every run writes ``manifest.json`` with the resolved configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    AnalysisError,
    WINDOWS,
    fit_items,
    fit_parabola,
    fit_sinusoid,
    fit_window,
    fmt,
    peak_stats,
    read_summary_csv,
    report,
    split_envelopes,
    trace_walk,
    write_summary_csv,
    write_trace_csv,
)
from .builders import (
    DIRECTIONS,
    BoundaryInitError,
    BoundarySpec,
    WalkSpec,
    WalkSpecError,
    blocked_directions,
    qft_roundtrip_experiment,
    roundtrip_prep,
    shift_experiment,
    shift_experiment_core,
    walk_parts,
)
from .circuit import Circuit, CircuitError, Register
from .decompose import gate_counts
from .lowering import lower_junction_experiment, lower_walk2d
from .qasm import write_qasm
from .statevector import StateError, apply_circuit, fidelity, new_basis_state
from .topology import RoutingError, extract_state, junction, load_graph, swap_gates

ENV_OUT = "QADDWALK_OUT"
DEFAULT_OUT = "qaddwalk-out"
DOMAIN_ERRORS = (WalkSpecError, RoutingError, AnalysisError, CircuitError, StateError)
_DIR_LETTERS = {"r": "right", "l": "left", "u": "up", "d": "down"}


# -- flag parsing helpers --------------------------------------------------------


def _parse_initial(text: str):
    if text == "uniform":
        return "uniform"
    if text.startswith("basis:"):
        try:
            node, coin = (int(v) for v in text[6:].split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected basis:<node>,<coin>, got {text!r}") from None
        return (node, coin)
    raise argparse.ArgumentTypeError(f"initial must be 'uniform' or 'basis:<node>,<coin>', got {text!r}")


def _parse_coin(text: str):
    if text.lower() == "hadamard":
        return "hadamard"
    path = Path(text)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"coin must be 'hadamard' or a matrix file, got {text!r}")
    return np.atleast_2d(np.loadtxt(path, dtype=complex))


def _parse_dirs(text: str) -> list[str]:
    if "+" in text or text in DIRECTIONS:
        return text.split("+")
    return [_DIR_LETTERS.get(ch, ch) for ch in text]


def _parse_boundary_2d(text: str, phase: float) -> BoundarySpec:
    kind, _, rest = text.partition(":")
    parts = rest.split(",")
    try:
        if kind == "single" and len(parts) == 3:
            return BoundarySpec.single(int(parts[0]), int(parts[1]), _parse_dirs(parts[2]), phase)
        if kind == "global" and len(parts) == 2:
            return BoundarySpec.global_(parts[0], int(parts[1]), phase)
    except ValueError as exc:
        if isinstance(exc, WalkSpecError):
            raise
        raise WalkSpecError(f"bad boundary {text!r}: {exc}") from None
    raise WalkSpecError(f"bad boundary {text!r}; use single:v,h,dirs or global:axis,value")


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(ENV_OUT) or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(out: Path, args, files: list[str], extra: dict | None = None) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    config = json.loads(json.dumps(config, default=lambda o: np.asarray(o).tolist() if isinstance(o, np.ndarray) else str(o)))
    body = {
        "tool": "qaddwalk",
        "version": __version__,
        "command": args.command,
        "config": config,
        "argv": sys.argv[1:],
        "files": sorted(files),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if extra:
        body.update(extra)
    (out / "manifest.json").write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _build_spec(dims, args, boundaries) -> WalkSpec:
    spec = WalkSpec(dims, args.steps, args.coin, tuple(boundaries), args.initial, strict_init=True)
    if not boundaries:
        return spec
    try:
        walk_parts(spec)
    except BoundaryInitError as exc:
        if args.strict_init:
            raise
        _warn(f"{exc}; running anyway (pass --strict-init to make this an error)")
        spec = WalkSpec(dims, args.steps, args.coin, tuple(boundaries), args.initial, strict_init=False)
    return spec


def _walk_outputs(out: Path, spec: WalkSpec) -> tuple[list[str], dict[str, object]]:
    trace = trace_walk(spec)
    write_trace_csv(trace, out / "trace.csv")
    write_summary_csv(trace, out / "summary.csv")
    items: dict[str, object] = {"steps": spec.steps, "nodes": spec.num_nodes}
    if spec.steps >= 1:
        ps = peak_stats(trace)
        items.update(
            peak_step=ps.peak_step,
            peak_avg_node=ps.peak_avg_node,
            peak_right_half_prob=ps.peak_right_half_prob,
        )
    if len(trace.leaks):
        items["max_boundary_leak"] = float(trace.leaks.max())
    items["max_norm_error"] = float(np.abs(trace.norms - 1).max()) if len(trace.norms) else 0.0
    return ["trace.csv", "summary.csv"], items


# -- subcommands -------------------------------------------------------------------


def cmd_walk1d(args) -> int:
    boundaries = [BoundarySpec.line(args.boundary, args.phase)] if args.boundary is not None else []
    spec = _build_spec((args.node_qubits,), args, boundaries)
    out = _out_dir(args)
    files, items = _walk_outputs(out, spec)
    (out / "peak.txt").write_text(report(items), encoding="utf-8")
    _manifest(out, args, files + ["peak.txt"])
    sys.stdout.write(report(items))
    return 0


def cmd_walk2d(args) -> int:
    boundaries = [_parse_boundary_2d(b, args.phase) for b in args.boundary or ()]
    spec = _build_spec((args.v_qubits, args.h_qubits), args, boundaries)
    out = _out_dir(args)
    files, items = _walk_outputs(out, spec)
    nh = 1 << args.h_qubits
    for (v, h), dirs in sorted(blocked_directions(spec).items()):
        items[f"blocked.{v * nh + h}"] = "+".join(sorted(dirs))
    (out / "peak.txt").write_text(report(items), encoding="utf-8")
    _manifest(out, args, files + ["peak.txt"])
    sys.stdout.write(report(items))
    return 0


def cmd_experiment(args) -> int:
    if args.kind == "qft-roundtrip":
        param = args.param or "000"
        circuit = qft_roundtrip_experiment(param)
        expected_node = int(param, 2) if isinstance(param, str) else int(param)
    else:
        try:
            k = int(args.param)
        except (TypeError, ValueError):
            raise WalkSpecError(f"shift experiment needs an integer --param, got {args.param!r}") from None
        circuit = shift_experiment(k)
        expected_node = k % 8
    expected = new_basis_state(4, expected_node << 1)
    items: dict[str, object] = {"kind": args.kind, "param": args.param}

    if args.routed:
        reg = Register.walk_1d(3)
        if args.kind == "qft-roundtrip":
            prep, middle = roundtrip_prep(args.param or "000"), Circuit(reg)
        else:
            prep, middle = Circuit(reg), shift_experiment_core(k)
        routed, layout = lower_junction_experiment(prep, middle)
        final = apply_circuit(new_basis_state(4, 0), routed)
        got = extract_state(final, layout.current, junction())
        items.update(
            routed=True,
            qft_swaps=swap_gates(routed) // 2,
            total_swaps=swap_gates(routed),
            layout_home=layout.at_home(),
        )
        emitted = routed
    else:
        got = apply_circuit(new_basis_state(4, 0), circuit)
        emitted = circuit
    items["fidelity"] = fidelity(got, expected)
    items.update(gate_counts(emitted).as_dict())
    out = _out_dir(args)
    write_qasm(emitted, out / "experiment.qasm")
    (out / "counts.txt").write_text(report(items), encoding="utf-8")
    _manifest(out, args, ["experiment.qasm", "counts.txt"])
    sys.stdout.write(report(items))
    return 0


def cmd_route(args) -> int:
    graph = load_graph(args.graph)
    spec = WalkSpec((3, 3), args.steps, initial=args.initial)
    strategies = ["single", "dual"] if args.strategy == "both" else [args.strategy]
    if "dual" not in strategies and graph.has_edge(12, 15):
        strategies.append("dual")
    if "single" not in strategies:
        strategies.insert(0, "single")
    reference = _abstract_distribution(spec)
    rows = []
    out = _out_dir(args)
    files = []
    for name in strategies:
        lw = lower_walk2d(spec, name, graph)
        counts = gate_counts(lw.circuit)
        dist = lw.node_distribution(spec)
        rows.append(
            {
                "strategy": name,
                "steps": args.steps,
                "swaps": swap_gates(lw.circuit),
                "two_qubit_count": counts.two_qubit_count,
                "two_qubit_depth": counts.two_qubit_depth,
                "depth": counts.depth,
                "max_prob_error": float(np.abs(dist - reference).max()),
                "equivalent": "pass" if np.allclose(dist, reference, atol=1e-9, rtol=0) else "fail",
            }
        )
        if name == args.strategy or args.strategy == "both":
            write_qasm(lw.circuit, out / f"routed_{name}.qasm")
            files.append(f"routed_{name}.qasm")
    with open(out / "comparison.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: fmt(v) if isinstance(v, float) else v for k, v in r.items()})
    files.append("comparison.csv")
    items: dict[str, object] = {r["strategy"] + ".two_qubit_depth": r["two_qubit_depth"] for r in rows}
    if len(rows) == 2:
        items["depth_ratio"] = rows[1]["two_qubit_depth"] / rows[0]["two_qubit_depth"]
    (out / "route.txt").write_text(report(items), encoding="utf-8")
    files.append("route.txt")
    _manifest(out, args, files)
    sys.stdout.write(report(items))
    return 0 if all(r["equivalent"] == "pass" for r in rows) else 1


def _abstract_distribution(spec: WalkSpec) -> np.ndarray:
    trace = trace_walk(spec)
    return trace.probabilities[-1]


def cmd_fit(args) -> int:
    x, y = read_summary_csv(args.input)
    if len(y) < 3:
        raise AnalysisError(f"need at least 3 points to fit, got {len(y)}")
    peak = int(np.argmax(y))
    end = fit_window(peak, args.window, len(y)) if peak >= 2 else len(y) - 1
    xs, ys = x[: end + 1], y[: end + 1]
    models = ["parabola", "sinusoid"] if args.model == "both" else [args.model]
    sets = {}
    if args.envelopes:
        env = split_envelopes(ys)
        for which in ("upper", "lower"):
            idx = env.upper if which == "upper" else env.lower
            sets[which] = (xs[idx], ys[idx])
    else:
        sets["all"] = (xs, ys)
    items: dict[str, object] = {"window": args.window, "window_end": int(xs[-1]), "peak_step": int(x[peak])}
    bracket = None
    if peak >= 2:
        bracket = (np.pi / (2 * (x[peak] + 1)), np.pi / (2 * (x[peak] - 1)))
    for name, (sx, sy) in sets.items():
        fits = {}
        if "parabola" in models:
            fits["parabola"] = fit_parabola(sx, sy)
        if "sinusoid" in models:
            fits["sinusoid"] = fit_sinusoid(sx, sy, bracket=bracket)
        for model, fr in fits.items():
            items.update(fit_items(f"{name}.{model}", fr))
        if len(fits) == 2:
            items[f"{name}.sigma_gap"] = fits["sinusoid"].sigma - fits["parabola"].sigma
    out = _out_dir(args)
    (out / "fit.txt").write_text(report(items), encoding="utf-8")
    _manifest(out, args, ["fit.txt"])
    sys.stdout.write(report(items))
    return 0


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qaddwalk", description="Adder-based coined quantum walks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")
        sp.add_argument("--seed", type=int, default=0, help="reserved; every pipeline is deterministic")

    def walk_flags(sp):
        sp.add_argument("--steps", type=int, required=True)
        sp.add_argument("--phase", type=float, default=0.0, help="boundary reflection phase in radians")
        sp.add_argument("--coin", type=_parse_coin, default="hadamard",
                        help="'hadamard' or a text file holding a unitary matrix")
        sp.add_argument("--initial", type=_parse_initial, default="uniform",
                        help="'uniform' or 'basis:<node>,<coin>'")
        sp.add_argument("--strict-init", action="store_true",
                        help="fail instead of warning when the start state feeds a forbidden coin state")

    w1 = sub.add_parser("walk1d", help="simulate a 1D walk and export its trace")
    w1.add_argument("--node-qubits", type=int, required=True)
    w1.add_argument("--boundary", type=int, help="block the edge between this node and the next")
    walk_flags(w1)
    common(w1)
    w1.set_defaults(func=cmd_walk1d)

    w2 = sub.add_parser("walk2d", help="simulate a 2D walk and export its trace")
    w2.add_argument("--v-qubits", type=int, required=True)
    w2.add_argument("--h-qubits", type=int, required=True)
    w2.add_argument("--boundary", action="append",
                    help="single:v,h,dirs (dirs like 'l', 'lu' or 'left+up') or global:axis,value; repeatable")
    walk_flags(w2)
    common(w2)
    w2.set_defaults(func=cmd_walk2d)

    ex = sub.add_parser("experiment", help="emit a hardware experiment circuit as OpenQASM")
    ex.add_argument("--kind", choices=["qft-roundtrip", "shift"], required=True)
    ex.add_argument("--param", help="3-bit initial state (qft-roundtrip) or shift count 1..7 (shift)")
    ex.add_argument("--routed", action="store_true", help="lower onto a degree-3 junction")
    common(ex)
    ex.set_defaults(func=cmd_experiment)

    ro = sub.add_parser("route", help="compare single- and dual-ancilla 2D lowerings")
    ro.add_argument("--strategy", choices=["single", "dual", "both"], required=True)
    ro.add_argument("--steps", type=int, required=True)
    ro.add_argument("--graph", default="heavy-hex",
                    help="preset (heavy-hex, heavy-hex-nospare, falcon27) or an edge-list file")
    ro.add_argument("--initial", type=_parse_initial, default=(0, 0))
    common(ro)
    ro.set_defaults(func=cmd_route)

    fi = sub.add_parser("fit", help="fit a summary CSV with a parabola and/or sinusoid")
    fi.add_argument("--input", required=True)
    fi.add_argument("--model", choices=["parabola", "sinusoid", "both"], default="both")
    fi.add_argument("--envelopes", action="store_true", help="fit upper and lower envelopes separately")
    fi.add_argument("--window", choices=WINDOWS, default="half",
                    help="fit steps 0..peak (quarter), 0..2*peak (half) or everything (full)")
    common(fi)
    fi.set_defaults(func=cmd_fit)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
