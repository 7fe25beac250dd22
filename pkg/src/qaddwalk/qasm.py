"""OpenQASM 2.0 export.

Frozen format::

    OPENQASM 2.0;
    include "qelib1.inc";
    // register: n0 n1 n2 c0
    qreg q[4];
    <one gate per line>

Emitted gate names are ``h, x, cx, ccx, cp, swap, rz``.  Uncontrolled phase
gates are written as ``rz`` (equal up to global phase).  Everything else is
lowered first; lowering may append clean ancillas, which then show up in the
register comment and the ``qreg`` size.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .circuit import Circuit, Gate
from .decompose import decompose_to_basis

HEADER = ('OPENQASM 2.0;', 'include "qelib1.inc";')


def _native(g: Gate) -> bool:
    k = len(g.controls)
    if g.name in ("h", "swap"):
        return k == 0
    if g.name == "x":
        return k <= 2
    if g.name == "p":
        return k <= 1
    return False


def format_angle(angle: float) -> str:
    """Exact multiples of pi print as ``3*pi/4``; others as a 17-digit float."""
    ratio = Fraction(angle / math.pi).limit_denominator(4096)
    if abs(float(ratio) * math.pi - angle) > 1e-12:
        return repr(float(angle))
    if ratio == 0:
        return "0"
    sign = "-" if ratio < 0 else ""
    num, den = abs(ratio.numerator), ratio.denominator
    text = "pi" if num == 1 else f"{num}*pi"
    return sign + (text if den == 1 else f"{text}/{den}")


def _line(g: Gate) -> str:
    q = [f"q[{i}]" for i in g.controls + g.targets]
    k = len(g.controls)
    if g.name == "h":
        return f"h {q[0]};"
    if g.name == "swap":
        return f"swap {q[0]},{q[1]};"
    if g.name == "x":
        return f"{('x', 'cx', 'ccx')[k]} {','.join(q)};"
    name = "rz" if k == 0 else "cp"
    return f"{name}({format_angle(g.angle)}) {','.join(q)};"


def to_qasm(circuit: Circuit) -> str:
    low = decompose_to_basis(circuit, keep=_native)
    lines = list(HEADER)
    lines.append("// register: " + " ".join(low.register.labels()))
    lines.append(f"qreg q[{low.num_qubits}];")
    lines.extend(_line(g) for g in low.gates)
    return "\n".join(lines) + "\n"


def write_qasm(circuit: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_qasm(circuit))


def gate_lines(text: str) -> list[str]:
    """Gate statements of an exported program (header, comments and qreg dropped)."""
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("//") or line in HEADER or line.startswith("qreg"):
            continue
        out.append(line)
    return out
