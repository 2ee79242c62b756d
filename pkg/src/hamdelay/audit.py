"""Finite-difference audit of action gradients.

For random smooth loops ``v`` and random tangents ``v_hat`` the central
difference of the action along ``v_hat`` must match ``<grad A(v), v_hat>``.
This single check pins every sign in the J / omega / action chain.
"""

import json

import numpy as np

from . import registry
from .functionals import (
    DoubleTimeProductFunctional,
    ExponentialFunctional,
    SumProductFunctional,
    TwoInputFunctional,
    directional_derivative_error,
)
from .loop_space import DelayShift, grid_times

AUDIT_TOL = 1e-6
AUDIT_EPS = 1e-5


def random_smooth_loop(rng, n, N, modes=3, amplitude=0.3, offset=0.2):
    """Trigonometric polynomial of degree ``modes`` with decaying random coefficients."""
    t = grid_times(N)
    V = np.tile(rng.normal(0.0, offset, 2 * n), (N, 1))
    for m in range(1, modes + 1):
        V += np.outer(np.cos(2 * np.pi * m * t), rng.normal(0.0, amplitude / m, 2 * n))
        V += np.outer(np.sin(2 * np.pi * m * t), rng.normal(0.0, amplitude / m, 2 * n))
    return V


def random_tangent(rng, n, N, modes=4):
    """Smooth random variation, unit-ish amplitude."""
    return random_smooth_loop(rng, n, N, modes=modes, amplitude=1.0, offset=1.0)


def gradient_audit(f, n, N, trials, rng, eps=AUDIT_EPS, flip_j=False):
    """Per-trial absolute errors of the directional-derivative check."""
    return np.array(
        [
            directional_derivative_error(f, random_smooth_loop(rng, n, N), random_tangent(rng, n, N), eps, flip_j)
            for _ in range(trials)
        ]
    )


def builtin_functionals(n, N):
    """One representative of each family on R^{2n}, built from registry models."""
    A = json.dumps((np.eye(n, k=1) - np.eye(n, k=-1)).tolist())
    s = DelayShift(N // 5)
    fam_a = SumProductFunctional(
        registry.make_field("sum(harmonic(0.5),linear(0.3))", n),
        [
            (registry.make_field("exp_p(1)", n), registry.make_field(f"exp_halfAq({n}; {A})", n)),
            (registry.make_field("harmonic(1)", n), registry.make_field("quartic(0.2)", n)),
        ],
        s,
    )
    fam_b = DoubleTimeProductFunctional(
        registry.make_family("modulated(harmonic(1); 0.3, 0.2)", n),
        registry.make_family("modulated(exp_p(1); 0.1, 0.4)", n),
    )
    fam_c = ExponentialFunctional(registry.make_family("taumod(harmonic(0.3); 0.5)", n))
    fam_d = TwoInputFunctional(registry.make_two_input("cross(exp_p(1), harmonic(1))", n), s)
    return {"A": fam_a, "B": fam_b, "C": fam_c, "D": fam_d}
