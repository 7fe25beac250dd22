import math

import numpy as np
import pytest

from qaddwalk.builders import qadd, qft, qft_dag, qft_roundtrip_experiment, shift_experiment
from qaddwalk.circuit import (
    CCX,
    CP,
    CX,
    MCX,
    SWAP,
    Circuit,
    CircuitError,
    Gate,
    H,
    P,
    Register,
    U,
    X,
    adjoint,
    equivalent,
    normalize_angle,
    unitary_of,
)
from qaddwalk.decompose import DecompositionError, decompose_to_basis, gate_counts
from qaddwalk.qasm import format_angle, gate_lines, to_qasm

from oracles import add_permutation, dft
from qasm_reader import read_qasm


def test_angle_normalization():
    assert normalize_angle(2 * math.pi) == pytest.approx(0.0)
    assert normalize_angle(math.pi / 3) == pytest.approx(math.pi / 3)
    assert -2 * math.pi < normalize_angle(-7.0) <= 2 * math.pi
    assert P(5 * math.pi, 0).angle == pytest.approx(math.pi)


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("x", (0,), (0,))
    with pytest.raises(CircuitError):
        Gate("swap", (0,))
    with pytest.raises(CircuitError):
        Gate("p", (0,))
    with pytest.raises(CircuitError):
        Gate("bogus", (0,))
    with pytest.raises(CircuitError):
        Circuit(2, (X(2),))


def test_adjoint_rules():
    assert adjoint(Circuit(1, (H(0),))).gates == (H(0),)
    c = Circuit(2, (P(math.pi / 2, 0), CX(0, 1)))
    assert adjoint(c).gates == (CX(0, 1), P(-math.pi / 2, 0))
    assert adjoint(adjoint(c)) == c


def test_adjoint_of_qft_is_inverse():
    u = unitary_of(qft(3))
    assert np.allclose(unitary_of(qft_dag(3)), u.conj().T, atol=1e-10)
    assert qft_dag(3).count_blocks("qft_dag") == 1


def test_unitary_of_small():
    assert np.array_equal(unitary_of(Circuit(1, (X(0),))), [[0, 1], [1, 0]])
    assert np.allclose(unitary_of(Circuit(1, (H(0),))), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    with pytest.raises(CircuitError):
        unitary_of(Circuit(11))


def test_qft_qadd_qftdag_is_cyclic_shift():
    r = Register.plain(3)
    u = unitary_of(qft(r) + qadd(r) + qft_dag(r))
    assert np.abs(u - add_permutation(3, 1)).max() <= 1e-9


def test_qft_matches_dft():
    assert np.abs(unitary_of(qft(3)) - dft(3)).max() <= 1e-10
    assert qft(1).gates == (H(0),)


def test_decompose_swap_and_cp():
    assert gate_counts(Circuit(2, (SWAP(0, 1),))).by_kind == {"cx": 3}
    counts = gate_counts(Circuit(2, (CP(0.3, 0, 1),)))
    assert counts.two_qubit_count == 2 and counts.phase_count == 3


def test_decompose_ccx():
    c = Circuit(3, (CCX(0, 1, 2),))
    assert gate_counts(c).two_qubit_count == 6
    assert equivalent(c, decompose_to_basis(c))


def test_qadd3_counts():
    r = Register.walk_1d(3)
    counts = gate_counts(qadd(r, r.nodes(), +1, r.coins()))
    assert counts.two_qubit_count == 6
    assert counts.phase_count == 9


@pytest.mark.parametrize("k", [3, 4])
def test_mcx_ladder_uses_clean_ancillas(k):
    c = Circuit(k + 1, (MCX(range(k), k),))
    d = decompose_to_basis(c)
    assert d.num_qubits == k + 1 + (k - 2)
    assert d.register.ancillas() == tuple(range(k + 1, d.num_qubits))
    assert equivalent(c, d)


def test_multi_controlled_custom_gate():
    rng = np.random.default_rng(4)
    m, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    c = Circuit(4, (U(m, (3,), (0, 1, 2), label="V"),))
    assert equivalent(c, decompose_to_basis(c))


def test_unsupported_decomposition():
    with pytest.raises(DecompositionError):
        decompose_to_basis(Circuit(3, (Gate("swap", (1, 2), (0,)),)))
    m = np.kron(np.eye(2), np.array([[0, 1], [1, 0]]))
    with pytest.raises(DecompositionError):
        decompose_to_basis(Circuit(2, (U(m, (0, 1)),)))


def test_gate_counts_trivial():
    g = gate_counts(Circuit(2))
    assert (g.total, g.depth, g.two_qubit_count) == (0, 0, 0)
    assert gate_counts(Circuit(2, (H(0), H(1)))).depth == 1
    c = qft(3)
    gc = gate_counts(c)
    assert gc.depth <= gc.total and gc.two_qubit_depth <= gc.depth


def test_format_angle():
    assert format_angle(math.pi / 4) == "pi/4"
    assert format_angle(-math.pi / 2) == "-pi/2"
    assert format_angle(3 * math.pi / 4) == "3*pi/4"
    assert format_angle(math.pi) == "pi"
    assert format_angle(0.0) == "0"
    assert float(format_angle(0.123)) == 0.123


def test_qasm_header_and_roundtrip():
    c = shift_experiment(3)
    text = to_qasm(c)
    lines = text.splitlines()
    assert lines[:4] == ['OPENQASM 2.0;', 'include "qelib1.inc";', "// register: n0 n1 n2 c0", "qreg q[4];"]
    assert equivalent(c, read_qasm(text))


def test_qasm_lowers_multicontrolled():
    c = Circuit(4, (MCX((0, 1, 2), 3), Gate("p", (3,), (0, 1), angle=0.7)))
    text = to_qasm(c)
    assert "qreg q[5];" in text and text.splitlines()[2].endswith("adec0")
    assert equivalent(c, read_qasm(text))


def test_qasm_roundtrip_structure():
    text = to_qasm(qft_roundtrip_experiment("011"))
    body = gate_lines(text)
    assert body[:2] == ["x q[1];", "x q[2];"]
    half = (len(body) - 2) // 2
    assert body[2] == "h q[0];" and body[2 + half - 1] == "swap q[0],q[2];"
    assert body[2 + half] == "swap q[0],q[2];" and body[-1] == "h q[0];"
