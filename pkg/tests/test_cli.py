import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qaddwalk.cli import main

import oracles
from qasm_reader import read_qasm

FIXTURES = Path(__file__).parent / "fixtures"


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, out


def kv(path):
    return dict(line.split("=", 1) for line in path.read_text().splitlines())


def test_walk1d_matches_oracle_fixture(tmp_path):
    code, out = run(tmp_path, "walk1d", "--node-qubits", "4", "--steps", "10")
    assert code == 0
    got = np.loadtxt(out / "trace.csv", delimiter=",", skiprows=1)
    ref = np.loadtxt(FIXTURES / "walk1d_n4_m10.csv", delimiter=",", skiprows=1)
    assert np.array_equal(got[:, :2], ref[:, :2])
    assert np.abs(got[:, 2] - ref[:, 2]).max() <= 1e-9
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "walk1d" and manifest["config"]["steps"] == 10
    assert set(manifest["files"]) == {"trace.csv", "summary.csv", "peak.txt"}


def test_walk1d_zero_steps(tmp_path):
    code, out = run(tmp_path, "walk1d", "--node-qubits", "3", "--steps", "0")
    assert code == 0
    lines = (out / "trace.csv").read_text().splitlines()
    assert len(lines) == 1 + 8 and all(ln.endswith(",0.125") for ln in lines[1:])


def test_walk1d_is_deterministic(tmp_path):
    args = ("walk1d", "--node-qubits", "3", "--steps", "7", "--boundary", "5", "--initial", "basis:2,0")
    _, a = run(tmp_path, *args, name="a")
    _, b = run(tmp_path, *args, name="b")
    for f in ("trace.csv", "summary.csv", "peak.txt"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_walk1d_bounded_report(tmp_path, capsys):
    code, out = run(tmp_path, "walk1d", "--node-qubits", "3", "--steps", "30", "--boundary", "5",
                    "--initial", "basis:2,0")
    assert code == 0
    report = kv(out / "peak.txt")
    assert float(report["max_boundary_leak"]) <= 1e-9
    assert "warning" not in capsys.readouterr().err


def test_walk1d_improper_start_warns_or_fails(tmp_path, capsys):
    code, _ = run(tmp_path, "walk1d", "--node-qubits", "3", "--steps", "3", "--boundary", "7")
    assert code == 0 and "warning" in capsys.readouterr().err
    code, _ = run(tmp_path, "walk1d", "--node-qubits", "3", "--steps", "3", "--boundary", "7",
                  "--strict-init", name="strict")
    assert code == 1 and "error" in capsys.readouterr().err


def test_walk1d_validation_errors(tmp_path):
    assert run(tmp_path, "walk1d", "--node-qubits", "3", "--steps", "2", "--boundary", "9")[0] == 1
    assert run(tmp_path, "walk1d", "--node-qubits", "3", "--steps", "-1")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["walk1d", "--node-qubits", "3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["walk1d", "--node-qubits", "3", "--steps", "2", "--initial", "middle"])
    assert exc.value.code == 2


def test_custom_coin_file(tmp_path):
    coin = tmp_path / "coin.txt"
    np.savetxt(coin, np.eye(2))
    code, out = run(tmp_path, "walk1d", "--node-qubits", "2", "--steps", "2", "--coin", str(coin),
                    "--initial", "basis:0,0")
    assert code == 0
    final = np.loadtxt(out / "trace.csv", delimiter=",", skiprows=1)[-4:, 2]
    assert np.allclose(final, [0, 0, 1, 0], atol=1e-12)


def test_walk2d_four_neighbours(tmp_path):
    code, out = run(tmp_path, "walk2d", "--v-qubits", "2", "--h-qubits", "2", "--steps", "1",
                    "--initial", "basis:5,0")
    assert code == 0
    rows = np.loadtxt(out / "trace.csv", delimiter=",", skiprows=1)
    last = rows[rows[:, 0] == 1]
    hits = {(int(r), int(c)) for _, r, c, p in last if p > 1e-12}
    assert hits == {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert (out / "trace.csv").read_text().startswith("step,row,col,probability\n")


def test_walk2d_global_boundary_pairs(tmp_path):
    code, out = run(tmp_path, "walk2d", "--v-qubits", "2", "--h-qubits", "2", "--steps", "2",
                    "--boundary", "global:h,3", "--initial", "basis:5,0")
    assert code == 0
    report = kv(out / "peak.txt")
    blocked = {int(k.split(".")[1]): v for k, v in report.items() if k.startswith("blocked.")}
    assert blocked == {n: ("right" if n % 4 == 3 else "left") for n in (0, 3, 4, 7, 8, 11, 12, 15)}


def test_walk2d_bad_direction_set(tmp_path):
    assert run(tmp_path, "walk2d", "--v-qubits", "2", "--h-qubits", "2", "--steps", "1",
               "--boundary", "single:1,1,lrud")[0] == 1
    assert run(tmp_path, "walk2d", "--v-qubits", "2", "--h-qubits", "2", "--steps", "1",
               "--boundary", "corner:1")[0] == 1


def test_experiment_shift(tmp_path):
    code, out = run(tmp_path, "experiment", "--kind", "shift", "--param", "7")
    assert code == 0
    counts = kv(out / "counts.txt")
    assert abs(float(counts["fidelity"]) - 1) <= 1e-10
    text = (out / "experiment.qasm").read_text()
    assert text.splitlines()[0] == "OPENQASM 2.0;"
    c = read_qasm(text)
    assert sum(1 for g in c.gates if g.name == "p" and g.controls == (3,)) == 7 * 3


def test_experiment_roundtrip(tmp_path):
    code, out = run(tmp_path, "experiment", "--kind", "qft-roundtrip", "--param", "011")
    assert code == 0 and abs(float(kv(out / "counts.txt")["fidelity"]) - 1) <= 1e-10


def test_experiment_routed(tmp_path):
    code, out = run(tmp_path, "experiment", "--kind", "shift", "--param", "2", "--routed")
    counts = kv(out / "counts.txt")
    assert code == 0 and counts["qft_swaps"] == "2" and counts["layout_home"] == "True"
    assert abs(float(counts["fidelity"]) - 1) <= 1e-10


def test_experiment_bad_param(tmp_path):
    assert run(tmp_path, "experiment", "--kind", "shift", "--param", "9")[0] == 1
    assert run(tmp_path, "experiment", "--kind", "qft-roundtrip", "--param", "0112")[0] == 1
    with pytest.raises(SystemExit):
        main(["experiment", "--kind", "teleport"])


def test_route_both(tmp_path):
    code, out = run(tmp_path, "route", "--strategy", "both", "--steps", "1")
    assert code == 0
    lines = (out / "comparison.csv").read_text().splitlines()
    assert lines[0].startswith("strategy,steps,swaps")
    rows = [ln.split(",") for ln in lines[1:]]
    assert [r[0] for r in rows] == ["single", "dual"] and all(r[-1] == "pass" for r in rows)
    assert int(rows[1][5]) < int(rows[0][5])  # depth
    assert (out / "routed_single.qasm").exists() and (out / "routed_dual.qasm").exists()


def test_route_dual_needs_spare(tmp_path):
    assert run(tmp_path, "route", "--strategy", "dual", "--steps", "1", "--graph", "heavy-hex-nospare")[0] == 1


def test_fit_envelopes_report(tmp_path):
    summary = tmp_path / "summary.csv"
    x = np.arange(40)
    y = 10 * np.sin(np.pi * x / 40) + 1.0 * (x % 2)
    summary.write_text("step,avg_node\n" + "".join(f"{i},{float(v)!r}\n" for i, v in zip(x, y)))
    code, out = run(tmp_path, "fit", "--input", str(summary), "--envelopes")
    assert code == 0
    rep = kv(out / "fit.txt")
    assert {"upper.parabola.sigma", "lower.sinusoid.sigma", "upper.sigma_gap"} <= set(rep)


def test_fit_exact_parabola(tmp_path):
    summary = tmp_path / "summary.csv"
    summary.write_text("step,avg_node\n" + "".join(f"{i},{-(i - 5) ** 2 + 30}\n" for i in range(11)))
    code, out = run(tmp_path, "fit", "--input", str(summary), "--model", "parabola", "--window", "full")
    assert code == 0 and float(kv(out / "fit.txt")["all.parabola.sigma"]) <= 1e-9


def test_fit_errors(tmp_path):
    two = tmp_path / "two.csv"
    two.write_text("step,avg_node\n0,1\n1,2\n")
    assert run(tmp_path, "fit", "--input", str(two), "--model", "parabola")[0] == 1
    assert run(tmp_path, "fit", "--input", str(tmp_path / "nope.csv"))[0] == 1


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("QADDWALK_OUT", str(tmp_path / "env"))
    assert main(["walk1d", "--node-qubits", "2", "--steps", "1"]) == 0
    assert (tmp_path / "env" / "manifest.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qaddwalk", "walk1d", "--node-qubits", "2", "--steps", "1",
         "--out", str(tmp_path / "m")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "peak_step=" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "qaddwalk"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_oracle_csv_fixture_is_current(tmp_path):
    k = 16
    probs = oracles.node_distributions(oracles.step_1d(4), oracles.uniform_coin0(k, 2), 10, 2)
    ref = np.loadtxt(FIXTURES / "walk1d_n4_m10.csv", delimiter=",", skiprows=1)[:, 2]
    assert np.abs(probs.reshape(-1) - ref).max() <= 1e-11
