import json
import math
from pathlib import Path

import numpy as np
import pytest

from qaddwalk.analysis import (
    AnalysisError,
    StepTrace,
    average_node,
    first_peak_window,
    fit_envelopes,
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
from qaddwalk.builders import BoundarySpec, WalkSpec
from qaddwalk.statevector import Distribution

import oracles

FIXTURES = Path(__file__).parent / "fixtures"
DERIVED = json.loads((FIXTURES / "derived.json").read_text())


def bounded(n, steps=None):
    steps = first_peak_window(n) if steps is None else steps
    return WalkSpec((n,), steps, boundaries=(BoundarySpec.line((1 << n) - 1),), strict_init=False)


def test_average_node():
    assert average_node([0, 0, 1, 0]) == 2
    assert average_node(Distribution((0, 1), np.full(4, 0.25))) == 1.5


def test_trace_matches_oracle_fixture():
    trace = trace_walk(WalkSpec((4,), 10))
    rows = np.loadtxt(FIXTURES / "walk1d_n4_m10.csv", delimiter=",", skiprows=1)
    ref = rows[:, 2].reshape(11, 16)
    assert np.abs(trace.probabilities - ref).max() <= 1e-9


def test_trace_2d_matches_oracle():
    spec = WalkSpec((2, 2), 5, initial=(5, 0))
    ref = oracles.node_distributions(oracles.step_2d(2, 2), oracles.basis(64, 20), 5, 4)
    assert np.abs(trace_walk(spec).probabilities - ref).max() <= 1e-9


def test_zero_step_trace():
    trace = trace_walk(WalkSpec((3,), 0))
    assert trace.steps == 0 and np.allclose(trace.probabilities[0], 1 / 8)
    with pytest.raises(AnalysisError):
        peak_stats(trace)


def test_bounded_trace_records_leaks():
    trace = trace_walk(WalkSpec((3,), 20, boundaries=(BoundarySpec.line(5),), initial=(2, 0)))
    assert len(trace.leaks) == 20 and trace.leaks.max() <= 1e-9
    assert np.abs(trace.norms - 1).max() <= 1e-10


def test_peak_stats_match_derived():
    for n in (4, 5):
        ps = peak_stats(trace_walk(bounded(n)))
        d = DERIVED["peaks"][str(n)]
        assert ps.peak_step == d["peak_step"]
        assert ps.peak_right_half_prob == pytest.approx(d["right_half"], abs=1e-8)


def test_first_peak_window():
    assert [first_peak_window(n) for n in (4, 5, 6)] == [24, 48, 96]


def test_split_envelopes():
    y = [0, 2, 1, 3, 2, 4]
    env = split_envelopes(y)
    assert list(env.upper) == [1, 3, 5] and list(env.lower) == [0, 2, 4]
    flat = split_envelopes([1.0] * 5)
    assert list(flat.upper) == list(flat.lower) == [0, 1, 2, 3, 4]
    with pytest.raises(AnalysisError):
        split_envelopes([1.0])


def test_fit_parabola_exact():
    x = np.arange(10.0)
    fit = fit_parabola(x, 0.5 * x**2 - 2 * x + 3)
    assert fit.sigma <= 1e-9
    assert fit.params["a"] == pytest.approx(0.5)
    with pytest.raises(AnalysisError):
        fit_parabola([0, 1], [0, 1])


def test_fit_sinusoid_recovers_parameters():
    x = np.arange(60.0)
    y = 3 * np.sin(0.11 * x + 0.4) + 1
    fit = fit_sinusoid(x, y, omega0=0.1)
    assert fit.sigma <= 1e-6
    assert fit.params["omega"] == pytest.approx(0.11, rel=1e-5)
    assert np.allclose(fit.predict(x), y, atol=1e-5)
    with pytest.raises(AnalysisError):
        fit_sinusoid(x, y, bracket=(0.2, 0.1))


def test_fit_window():
    assert fit_window(45, "quarter", 97) == 45
    assert fit_window(45, "half", 97) == 90
    assert fit_window(45, "half", 60) == 59
    assert fit_window(45, "full", 97) == 96
    with pytest.raises(AnalysisError):
        fit_window(45, "eighth", 97)


def test_fit_envelopes_on_small_walk():
    fits = fit_envelopes(trace_walk(bounded(4)))
    assert fits.peak_step == 11 and fits.window == 22
    assert set(fits.fits) == {f"{e}.{m}" for e in ("upper", "lower") for m in ("parabola", "sinusoid")}
    assert all(f.sigma >= 0 and f.n_points >= 4 for f in fits.fits.values())
    omega = fits.fits["upper.sinusoid"].params["omega"]
    assert math.pi / 24 <= omega <= math.pi / 20


def test_csv_outputs(tmp_path):
    trace = trace_walk(WalkSpec((2,), 2))
    write_trace_csv(trace, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "step,node,probability" and len(lines) == 1 + 3 * 4
    write_summary_csv(trace, tmp_path / "s.csv")
    x, y = read_summary_csv(tmp_path / "s.csv")
    assert np.allclose(y, trace.average_nodes, atol=1e-11) and list(x) == [0, 1, 2]


def test_trace_csv_2d_header(tmp_path):
    trace = trace_walk(WalkSpec((1, 2), 1, initial=(0, 0)))
    write_trace_csv(trace, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "step,row,col,probability" and lines[1] == "0,0,0,1"


def test_summary_reader_errors(tmp_path):
    with pytest.raises(AnalysisError):
        read_summary_csv(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(AnalysisError):
        read_summary_csv(bad)


def test_report_format():
    assert fmt(1 / 3) == "0.333333333333"
    assert report({"a": 1, "b": 0.5}) == "a=1\nb=0.5\n"


def test_step_trace_properties():
    t = StepTrace((1,), np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert t.steps == 1 and t.num_nodes == 2 and list(t.average_nodes) == [0, 1]
    assert math.isclose(t.distribution(1)[1], 1)


def test_uniform_start_average_node():
    for n in (3, 6):
        trace = trace_walk(WalkSpec((n,), 0))
        assert trace.average_nodes[0] == pytest.approx(((1 << n) - 1) / 2)
