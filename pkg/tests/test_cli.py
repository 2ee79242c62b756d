import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hamdelay.cli import main
from hamdelay.loop_space import Loop
from hamdelay.serialize import read_loop, read_result, read_series_csv, write_loop_csv

PI = repr(math.pi)
HARMONIC_A = {"family": "A", "n": 1, "N": 32, "F": f"harmonic({PI})"}


def run(tmp_path, config, command, *extra):
    cfg = tmp_path / "config.json"
    cfg.write_text(config if isinstance(config, str) else json.dumps(config))
    out = tmp_path / "out"
    return main([command, "--config", str(cfg), "--out", str(out), *extra]), out


def test_solve_harmonic(tmp_path):
    code, out = run(tmp_path, {"functional": HARMONIC_A, "seed": {"kind": "circle", "radius": 1.0},
                               "perturbation": 0.01}, "solve")
    assert code == 0
    res = read_result(out / "result.json", out / "orbit.csv")
    assert res.converged and res.loop.grid_size == 32 and res.residual_sup <= 1e-10
    assert not (out / "energy.csv").exists()


def test_solve_family_b_writes_energy(tmp_path):
    cfg = {"functional": {"family": "B", "n": 1, "N": 32, "H": f"harmonic({PI})"},
           "seed": {"kind": "circle", "radius": 0.42}, "perturbation": 0.01}
    code, out = run(tmp_path, cfg, "solve")
    assert code == 0
    rows = read_series_csv(out / "energy.csv")
    E = np.array([float(r["energy"]) for r in rows])
    assert len(E) == 32 and np.std(E) <= 1e-8


def test_malformed_json_is_usage_error(tmp_path):
    assert run(tmp_path, "{not json", "solve")[0] == 2


def test_forced_non_convergence(tmp_path):
    cfg = {"functional": HARMONIC_A, "seed": {"kind": "circle", "radius": 3.0}, "perturbation": 0.3,
           "solver": {"max_iters": 1}}
    code, out = run(tmp_path, cfg, "solve")
    assert code == 1
    assert json.loads((out / "result.json").read_text())["converged"] is False


def test_check_grad_pass_and_flip(tmp_path):
    cfg = {"functional": {"family": "A", "n": 2, "N": 64, "F": "harmonic(0.5)",
                          "pairs": [["exp_p(1)", "quartic(0.2)"]], "tau_steps": 9}}
    code, out = run(tmp_path, cfg, "check-grad")
    report = json.loads((out / "gradcheck.json").read_text())
    assert code == 0 and report["passed"] and report["max_error"] <= 1e-6 and report["trials"] == 20
    assert run(tmp_path, cfg, "check-grad", "--debug-flip-j")[0] == 1


def test_check_grad_zero_trials(tmp_path):
    assert run(tmp_path, {"functional": HARMONIC_A, "trials": 0}, "check-grad")[0] == 2


def test_bare_functional_config_accepted(tmp_path):
    assert run(tmp_path, HARMONIC_A, "check-grad")[0] == 0


def test_audit_command(tmp_path):
    code, out = run(tmp_path, {"N": 32, "trials": 3}, "audit")
    report = json.loads((out / "audit.json").read_text())
    assert code == 0 and report["passed"] and len(report["families"]) == 8


@pytest.mark.parametrize("bad", [
    {"functional": {"family": "Z", "n": 1, "N": 8}},
    {"functional": {"family": "A", "n": 1, "N": 8, "F": "nonsense(1)"}},
    {"functional": {"family": "A", "n": 1, "N": 8, "tau_steps": 8}},
    {"functional": {"family": "A", "n": 1, "N": 7, "tau": 0.5}},
    {"solver": {}},
])
def test_config_errors_exit_2(tmp_path, bad):
    assert run(tmp_path, bad, "solve")[0] == 2


def test_lv_reduce_constant_loop(tmp_path):
    loop = tmp_path / "const.csv"
    write_loop_csv(Loop.constant([0.1, 0.2, 0.3, 0.4], 16), loop)
    cfg = {"lv": {"species": 2, "A": [[0, 1], [-1, 0]], "b": [1, -1], "tau_steps": 8, "N": 16},
           "input_loop": str(loop)}
    code, out = run(tmp_path, cfg, "lv-reduce")
    assert code == 0
    x = read_loop(out / "x_loop.csv")
    assert np.all(x.values == 0.0)
    assert json.loads((out / "lv_residual.json").read_text())["lv_residual_sup"] == 0.0


def test_lv_reduce_errors(tmp_path):
    lv = {"species": 2, "A": [[0, 1], [-1, 0]], "b": [1, -1], "N": 16}
    assert run(tmp_path, {"lv": lv}, "lv-reduce")[0] == 2
    assert run(tmp_path, {"lv": lv, "input_loop": str(tmp_path / "nope.csv")}, "lv-reduce")[0] == 2
    odd = dict(lv, N=15, tau=0.5)
    assert run(tmp_path, {"lv": odd, "input_loop": "x.csv"}, "lv-reduce")[0] == 2
    skew = dict(lv, A=[[0, 1], [1, 0]])
    assert run(tmp_path, {"lv": skew, "input_loop": "x.csv"}, "lv-reduce")[0] == 2


def test_sweep_single_entry(tmp_path):
    cfg = {"functional": HARMONIC_A, "tau_path": [0], "perturbation": 0.01}
    code, out = run(tmp_path, cfg, "sweep-tau")
    rows = read_series_csv(out / "branch.csv")
    assert code == 0 and len(rows) == 1 and rows[0]["converged"] == "True"
    assert read_loop(out / "orbit_s0000.csv").grid_size == 32


def test_sweep_inert_delay(tmp_path):
    fam = {"family": "A", "n": 1, "N": 32, "pairs": [[f"harmonic({PI})", "const(1)"]]}
    code, out = run(tmp_path, {"functional": fam, "tau_path": [0, 4, 8, 16], "perturbation": 0.01}, "sweep-tau")
    assert code == 0
    loops = [read_loop(out / f"orbit_s{s:04d}.csv").values for s in (0, 4, 8, 16)]
    for v in loops[1:]:
        assert np.max(np.abs(v - loops[0])) <= 1e-12
    taus = [float(r["tau"]) for r in read_series_csv(out / "branch.csv")]
    assert taus == sorted(taus)


def test_sweep_rejects_undelayed_family(tmp_path):
    cfg = {"functional": {"family": "C", "n": 1, "N": 16, "H": "harmonic(1)"}, "tau_path": [0, 2]}
    assert run(tmp_path, cfg, "sweep-tau")[0] == 2


def test_seed_flag_changes_randomness(tmp_path):
    cfg = {"functional": HARMONIC_A, "trials": 2}
    _, out = run(tmp_path, cfg, "check-grad", "--seed", "1")
    a = json.loads((out / "gradcheck.json").read_text())["errors"]
    _, out = run(tmp_path, cfg, "check-grad", "--seed", "1")
    assert json.loads((out / "gradcheck.json").read_text())["errors"] == a
    _, out = run(tmp_path, cfg, "check-grad", "--seed", "2")
    assert json.loads((out / "gradcheck.json").read_text())["errors"] != a


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"functional": HARMONIC_A, "trials": 2}))
    proc = subprocess.run([sys.executable, "-m", "hamdelay", "check-grad", "--config", str(cfg),
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "hamdelay", "solve"], capture_output=True, text=True)
    assert proc.returncode == 2
