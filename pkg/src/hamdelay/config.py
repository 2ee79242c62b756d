"""Build functionals, LV models and seeds from JSON-style dictionaries.

Functional config::

    {"family": "A"|"B"|"C"|"D", "n": 1, "N": 64, "tau_steps": 0,
     "F": <id>, "pairs": [[<id>, <id>], ...], "H": <id>, "K": <id>}

LV config::

    {"species": 2, "A": [[0, 1], [-1, 0]], "b": [1, -1], "tau_steps": 0, "N": 128}

``tau`` (a fraction of the period) may replace ``tau_steps``.
"""

import numpy as np

from . import registry
from .errors import ModelSpecError
from .functionals import (
    DoubleTimeProductFunctional,
    ExponentialFunctional,
    SumProductFunctional,
    TwoInputFunctional,
)
from .lotka_volterra import LVModel, seed_loop
from .loop_space import DelayShift, Loop
from .serialize import read_loop

FAMILIES = ("A", "B", "C", "D")


def _int(d, key, minimum=None):
    if key not in d:
        raise ModelSpecError(f"config is missing {key!r}")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ModelSpecError(f"{key} must be an integer, got {v!r}")
    v = int(v)
    if minimum is not None and v < minimum:
        raise ModelSpecError(f"{key} must be >= {minimum}, got {v}")
    return v


def delay_from(d, N):
    """DelayShift from ``tau_steps`` or ``tau``; raises InvalidDelayError for incommensurate delays."""
    if "tau_steps" in d and "tau" in d:
        raise ModelSpecError("give either tau_steps or tau, not both")
    if "tau" in d:
        return DelayShift.from_tau(float(d["tau"]), N)
    return DelayShift(d.get("tau_steps", 0)).check(N)


def build_functional(d):
    """Return ``(functional, n, N)``."""
    family = d.get("family")
    if family not in FAMILIES:
        raise ModelSpecError(f"family must be one of {FAMILIES}, got {family!r}")
    n = _int(d, "n", 1)
    N = _int(d, "N", 4)
    if family == "A":
        F = registry.make_field(d.get("F", "zero"), n)
        pairs = d.get("pairs", [])
        if not isinstance(pairs, list) or any(not isinstance(p, (list, tuple)) or len(p) != 2 for p in pairs):
            raise ModelSpecError("pairs must be a list of [H, K] model-ID pairs")
        fields = [(registry.make_field(h, n), registry.make_field(k, n)) for h, k in pairs]
        return SumProductFunctional(F, fields, delay_from(d, N)), n, N
    if family in ("B", "C") and "H" not in d:
        raise ModelSpecError(f"family {family} needs H")
    if family == "B":
        H = registry.make_family(d["H"], n)
        K = H if d.get("K", d["H"]) == d["H"] else registry.make_family(d["K"], n)
        return DoubleTimeProductFunctional(H, K), n, N
    if family == "C":
        try:
            return ExponentialFunctional(registry.make_family(d["H"], n)), n, N
        except ValueError as exc:
            raise ModelSpecError(str(exc)) from None
    if "H" not in d:
        raise ModelSpecError("family D needs a two-input H")
    return TwoInputFunctional(registry.make_two_input(d["H"], n), delay_from(d, N)), n, N


def with_delay(d, steps):
    """Copy of a functional/LV config with a different delay."""
    d = dict(d)
    d.pop("tau", None)
    d["tau_steps"] = int(steps)
    return d


def build_lv(d):
    """Return ``(LVModel, N)``."""
    species = _int(d, "species", 1)
    N = _int(d, "N", 4)
    try:
        A = np.array(d["A"], dtype=float)
        b = np.array(d["b"], dtype=float)
    except KeyError as exc:
        raise ModelSpecError(f"LV config is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ModelSpecError(f"bad LV matrix data: {exc}") from None
    if A.shape != (species, species) or b.shape != (species,):
        raise ModelSpecError(f"A must be {species}x{species} and b of length {species}")
    return LVModel(A, b, delay_from(d, N)), N


def build_seed(seed_cfg, n, N, lv_model=None):
    """Seed loop from ``{"kind": "constant"|"circle"|"file"|"lv_equilibrium", ...}``."""
    if seed_cfg is None:
        seed_cfg = {"kind": "lv_equilibrium"} if lv_model is not None else {"kind": "circle", "radius": 1.0}
    kind = seed_cfg.get("kind")
    if kind == "constant":
        point = np.asarray(seed_cfg.get("point", np.zeros(2 * n)), dtype=float)
        if point.shape != (2 * n,):
            raise ModelSpecError(f"constant seed point must have {2 * n} entries")
        return Loop.constant(point, N)
    if kind == "circle":
        center = seed_cfg.get("center")
        if center is not None and len(center) != 2 * n:
            raise ModelSpecError(f"circle center must have {2 * n} entries")
        return Loop.circle(float(seed_cfg.get("radius", 1.0)), N, n=n, center=center, turns=int(seed_cfg.get("turns", 1)))
    if kind == "file":
        loop = read_loop(seed_cfg["path"])
        if loop.grid_size != N or loop.dim != 2 * n:
            raise ModelSpecError(f"seed file has shape {loop.values.shape}, expected ({N}, {2 * n})")
        return loop
    if kind == "lv_equilibrium":
        if lv_model is None:
            raise ModelSpecError("lv_equilibrium seeds need an LV config")
        return seed_loop(lv_model, N, float(seed_cfg.get("amplitude", 0.1)))
    raise ModelSpecError(f"unknown seed kind {kind!r}")


def perturb(loop, rel, rng):
    """Multiply every entry by ``1 + rel * N(0, 1)``."""
    if not rel:
        return loop
    return loop.with_values(loop.values * (1 + rel * rng.standard_normal(loop.values.shape)))
