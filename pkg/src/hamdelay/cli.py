"""Command-line front end.

    hamdelay {solve,check-grad,lv-reduce,sweep-tau,audit} --config CONFIG [--out DIR] [--seed INT]

Exit codes: 0 success, 1 numerical non-convergence (or a failed check),
2 usage or configuration error.

Config file (JSON)::

    {
      "functional": {...} | "lv": {...},        # schemas in hamdelay.config
      "solver": {"max_iters": 200, ...},        # SolverConfig fields
      "seed": {"kind": "circle", "radius": 1},  # or constant / file / lv_equilibrium
      "perturbation": 0.01,                     # relative noise on the seed
      "trials": 20,                             # check-grad
      "tau_path": [0, 8, 16],                   # sweep-tau, in grid steps
      "input_loop": "orbit.csv",                # lv-reduce
      "solve_first": false,                     # lv-reduce
      "rng_seed": 0                             # overridden by --seed
    }
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import audit as audit_mod
from . import config as cfgmod
from .errors import HamDelayError, ModelSpecError
from .functionals import DoubleTimeProductFunctional
from .lotka_volterra import build_lv_functional, classical_lv_residual, lv_delay_residual, reduce_to_x
from .serialize import read_loop, write_loop_csv, write_result, write_series_csv
from .solvers import SolverConfig, continue_in_tau, energy_ratio, solve_periodic

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("hamdelay")


class UsageError(Exception):
    pass


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(d, dict):
        raise UsageError("config must be a JSON object")
    if "family" in d:  # a bare functional config
        d = {"functional": d}
    elif "species" in d:
        d = {"lv": d}
    return d


class Problem:
    """A resolved functional (or LV model) with its grid and seed."""

    def __init__(self, raw, rng):
        self.raw = raw
        self.lv = None
        if "lv" in raw:
            self.lv, self.N = cfgmod.build_lv(raw["lv"])
            self.functional = build_lv_functional(self.lv)
            self.n = self.lv.species
        elif "functional" in raw:
            self.functional, self.n, self.N = cfgmod.build_functional(raw["functional"])
        else:
            raise ModelSpecError("config needs a 'functional' or an 'lv' section")
        self.solver = SolverConfig.from_dict(raw.get("solver", {}))
        self.rng = rng

    def seed_loop(self):
        loop = cfgmod.build_seed(self.raw.get("seed"), self.n, self.N, self.lv)
        return cfgmod.perturb(loop, float(self.raw.get("perturbation", 0.0)), self.rng)

    def builder(self):
        if self.lv is not None:
            return lambda s: build_lv_functional(self.lv.with_delay(s))
        section = self.raw["functional"]
        if section["family"] not in ("A", "D"):
            raise ModelSpecError(f"family {section['family']} has no delay parameter to sweep")
        return lambda s: cfgmod.build_functional(cfgmod.with_delay(section, s))[0]


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2))


def _report_result(result, seed):
    if result.converged and result.is_constant and not seed_is_constant(seed):
        print("converged to a CONSTANT loop (a critical point of the Hamiltonian); "
              "try an inflated seed", file=sys.stderr)
    status = "converged" if result.converged else "NOT converged"
    print(f"{status}: residual_sup={result.residual_sup:.3e} iters={result.iters} "
          f"action={result.action_value:.12g}")


def seed_is_constant(loop):
    V = loop.values
    return bool(np.max(np.abs(V - V.mean(axis=0))) == 0.0)


def cmd_solve(raw, out, rng, args):
    prob = Problem(raw, rng)
    seed = prob.seed_loop()
    result = solve_periodic(prob.functional, seed, prob.solver)
    write_result(result, out)
    f = prob.functional
    if isinstance(f, DoubleTimeProductFunctional) and result.energy_std is not None:
        E = f.H.value(result.loop.values, 0.0, 0.0)
        write_series_csv(out / "energy.csv", ["t", "energy"], [result.loop.times, E])
        print(f"energy_std/(1+|mean|) = {energy_ratio(result):.3e}")
    _report_result(result, seed)
    return EXIT_OK if result.converged else EXIT_NUMERIC


def cmd_check_grad(raw, out, rng, args):
    prob = Problem(raw, rng)
    trials = raw.get("trials", 20)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ModelSpecError(f"trials must be a positive integer, got {trials!r}")
    errors = audit_mod.gradient_audit(prob.functional, prob.n, prob.N, trials, rng, flip_j=args.debug_flip_j)
    max_err = float(errors.max())
    passed = max_err <= audit_mod.AUDIT_TOL
    _write_json(
        out / "gradcheck.json",
        {
            "max_error": max_err,
            "errors": errors.tolist(),
            "trials": trials,
            "eps": audit_mod.AUDIT_EPS,
            "tolerance": audit_mod.AUDIT_TOL,
            "flip_j": bool(args.debug_flip_j),
            "passed": passed,
        },
    )
    print(f"gradient audit: max error {max_err:.3e} over {trials} trials -> {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_NUMERIC


def cmd_audit(raw, out, rng, args):
    """Gradient audit of every built-in family at n = 1 and n = 2."""
    N = int(raw.get("N", 64))
    trials = int(raw.get("trials", 20))
    if trials < 1 or N < 4:
        raise ModelSpecError("audit needs trials >= 1 and N >= 4")
    report = {}
    ok = True
    for n in (1, 2):
        for fam, f in audit_mod.builtin_functionals(n, N).items():
            errs = audit_mod.gradient_audit(f, n, N, trials, rng, flip_j=args.debug_flip_j)
            passed = bool(errs.max() <= audit_mod.AUDIT_TOL)
            ok &= passed
            report[f"{fam}/n={n}"] = {"max_error": float(errs.max()), "passed": passed}
            print(f"family {fam} n={n}: max error {errs.max():.3e} {'PASS' if passed else 'FAIL'}")
    _write_json(out / "audit.json", {"N": N, "trials": trials, "families": report, "passed": ok})
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_lv_reduce(raw, out, rng, args):
    if "lv" not in raw:
        raise ModelSpecError("lv-reduce needs an 'lv' config section")
    prob = Problem(raw, rng)
    m = prob.lv
    status = EXIT_OK
    if raw.get("solve_first"):
        result = solve_periodic(prob.functional, prob.seed_loop(), prob.solver)
        write_result(result, out)
        loop = result.loop
        if not result.converged:
            status = EXIT_NUMERIC
    elif "input_loop" in raw:
        loop = read_loop(raw["input_loop"])
        if loop.grid_size != prob.N or loop.dim != 2 * m.species:
            raise ModelSpecError(f"input loop has shape {loop.values.shape}, expected ({prob.N}, {2 * m.species})")
    else:
        raise ModelSpecError("lv-reduce needs 'input_loop' or 'solve_first': true")
    phase_res = float(np.max(np.abs(prob.functional.residual(loop))))
    x = reduce_to_x(loop)
    write_loop_csv(x, out / "x_loop.csv")
    res = lv_delay_residual(m, x)
    report = {
        "lv_residual_sup": float(np.max(np.abs(res))),
        "phase_residual_sup": phase_res,
        "tau_steps": m.delay.steps,
        "N": prob.N,
        "min_population": float(x.values.min()),
    }
    if m.delay.steps == 0:
        report["classical_residual_sup"] = float(np.max(np.abs(classical_lv_residual(m, x))))
    _write_json(out / "lv_residual.json", report)
    print(f"reduced loop: lv residual sup {report['lv_residual_sup']:.3e} "
          f"(phase residual sup {phase_res:.3e})")
    return status


def cmd_sweep_tau(raw, out, rng, args):
    prob = Problem(raw, rng)
    path = raw.get("tau_path", [0])
    if not isinstance(path, list) or not path:
        raise ModelSpecError("tau_path must be a non-empty list of delay steps")
    branch = continue_in_tau(prob.builder(), path, prob.seed_loop(), prob.solver)
    rows = []
    for s, res in zip(path, branch):
        write_loop_csv(res.loop, out / f"orbit_s{int(s):04d}.csv")
        rows.append((s / prob.N, int(s), res.residual_sup, res.action_value, res.converged))
    cols = list(zip(*rows))
    write_series_csv(out / "branch.csv", ["tau", "tau_steps", "residual_sup", "action", "converged"], cols)
    full = len(branch) == len(path) and branch[-1].converged
    print(f"branch: {sum(r.converged for r in branch)}/{len(path)} delays converged")
    return EXIT_OK if full else EXIT_NUMERIC


COMMANDS = {
    "solve": cmd_solve,
    "check-grad": cmd_check_grad,
    "lv-reduce": cmd_lv_reduce,
    "sweep-tau": cmd_sweep_tau,
    "audit": cmd_audit,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="hamdelay", description="Hamiltonian delay equations via action functionals")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default="./out", help="output directory (default ./out)")
        p.add_argument("--seed", type=int, default=None, help="random seed (overrides rng_seed)")
        p.add_argument("--debug-flip-j", action="store_true", help="use the wrong rotation in gradients (audit testing)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        raw = _load_config(args.config)
        seed = args.seed if args.seed is not None else raw.get("rng_seed", 0)
        rng = np.random.default_rng(int(seed))
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create output directory {out}: {exc}") from None
        return COMMANDS[args.command](raw, out, rng, args)
    except (UsageError, HamDelayError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, HamDelayError) and not isinstance(exc, ValueError):
            # breakdown / blow-up: numerical failure, not a usage error
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
