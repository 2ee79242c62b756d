"""Periodic-orbit solvers.

The action is strongly indefinite, so orbits are found as zeros of the
critical-point residual: Levenberg-Marquardt on the stacked residual with a
dense forward-difference Jacobian and one phase-anchor row.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import BlowUpError, ModelSpecError, SolverBreakdownError
from .functionals import DoubleTimeProductFunctional, ResidualSystem, energy_trace
from .loop_space import DelayShift, Loop, derivative
from .symplectic import ham_vector_field

logger = logging.getLogger(__name__)

FIRST_POINT = "first-point-coordinate-fixed"
MEAN_PHASE = "mean-phase"


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 200
    residual_tol: float = 1e-10
    lm_lambda0: float = 1e-3
    lm_scale: float = 10.0
    fd_jacobian_eps: float = 1e-7
    phase_anchor: str = FIRST_POINT

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ModelSpecError(f"max_iters must be an integer >= 1, got {self.max_iters!r}")
        for name in ("residual_tol", "lm_lambda0", "fd_jacobian_eps"):
            if not getattr(self, name) > 0:
                raise ModelSpecError(f"{name} must be positive")
        if not self.lm_scale > 1:
            raise ModelSpecError("lm_scale must be > 1")
        if self.phase_anchor not in (FIRST_POINT, MEAN_PHASE):
            raise ModelSpecError(f"unknown phase_anchor {self.phase_anchor!r}")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ModelSpecError(f"unknown solver config keys: {sorted(extra)}")
        return cls(**d)

    def to_dict(self):
        return asdict(self)


@dataclass
class OrbitResult:
    loop: Loop
    residual_sup: float
    action_value: float
    iters: int
    converged: bool
    energy_std: Optional[float] = None
    energy_mean: Optional[float] = None
    smallest_singular: Optional[float] = None
    is_constant: bool = False

    def diagnostics(self):
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "loop"}
        d["n"] = self.loop.half_dim
        d["N"] = self.loop.grid_size
        return d

    def to_json(self, **kw):
        return json.dumps(self.diagnostics(), **kw)


def _sup(a):
    return float(np.max(np.abs(a))) if a.size else 0.0


def _anchor(cfg, guess):
    g = guess.values.ravel().copy()
    if cfg.phase_anchor == FIRST_POINT:
        # pin the coordinate of point 0 that moves fastest along the guess;
        # a coordinate at rest there leaves the time-shift direction free
        velocity = derivative(guess.values)[0]
        c = int(np.argmax(np.abs(velocity))) if np.any(velocity) else 0

        def row(x):
            return x[c] - g[c]

        grad = np.zeros_like(g)
        grad[c] = 1.0
        return row, grad
    direction = derivative(guess.values).ravel() / guess.grid_size

    def row(x):
        return float(direction @ (x - g))

    return row, direction


def fd_jacobian(fun, x, r0, eps):
    """Dense forward-difference Jacobian, one column per unknown."""
    J = np.empty((r0.size, x.size))
    xp = x.copy()
    for j in range(x.size):
        h = eps * max(1.0, abs(x[j]))
        xp[j] = x[j] + h
        J[:, j] = (fun(xp) - r0) / h
        xp[j] = x[j]
    return J


def residual_jacobian(f, v, eps=1e-7, anchor=None):
    """Jacobian of the flat residual at ``v``, optionally with an anchor row appended."""
    system = ResidualSystem(f, v.half_dim, v.grid_size)
    x = v.values.ravel().copy()
    J = fd_jacobian(system, x, system(x), eps)
    if anchor is not None:
        J = np.vstack([J, anchor[None, :]])
    return J


def _is_constant(v, tol=1e-8):
    V = v.values
    return bool(np.max(np.abs(V - V.mean(axis=0))) <= tol * (1 + np.max(np.abs(V))))


def _finish(f, x, system, it, converged, cfg, anchor_grad):
    v = system.loop(x)
    R = f.residual(v)  # recomputed from scratch, not the solver's cached value
    res = OrbitResult(
        loop=v,
        residual_sup=_sup(R),
        action_value=float(f.action(v)),
        iters=it,
        converged=bool(converged and _sup(R) <= cfg.residual_tol),
        is_constant=_is_constant(v),
    )
    if isinstance(f, DoubleTimeProductFunctional) and f.autonomous and (f.H is f.K or f.H.name == f.K.name):
        E = energy_trace(_AutonomousView(f.H), v)
        res.energy_std = float(np.std(E))
        res.energy_mean = float(np.mean(E))
    return res


class _AutonomousView:
    """Evaluate an autonomous time family as a plain field."""

    def __init__(self, family):
        self.family = family
        self.dim = family.dim

    def value(self, x):
        return self.family.value(x, 0.0, 0.0)

    def gradient(self, x):
        return self.family.gradient_x(x, 0.0, 0.0)


def solve_periodic(f, guess, cfg=None, singular_values=True):
    """Find a zero of ``f``'s residual near ``guess``.

    Returns an :class:`OrbitResult`; running out of iterations yields
    ``converged=False`` rather than an exception. Raises
    :class:`SolverBreakdownError` if the damped normal equations fail.
    """
    cfg = cfg or SolverConfig()
    system = ResidualSystem(f, guess.half_dim, guess.grid_size)
    anchor_row, anchor_grad = _anchor(cfg, guess)

    def stacked(x):
        return np.append(system(x), anchor_row(x))

    x = guess.values.ravel().copy()
    r = stacked(x)
    lam = cfg.lm_lambda0
    it = 0
    converged = _sup(r[:-1]) <= cfg.residual_tol
    while not converged and it < cfg.max_iters:
        J = fd_jacobian(system, x, r[:-1], cfg.fd_jacobian_eps)
        J = np.vstack([J, anchor_grad[None, :]])
        JTJ = J.T @ J
        g = J.T @ r
        diag = np.diag(JTJ).copy()
        diag = np.maximum(diag, 1e-12 * max(diag.max(), 1.0))
        cost = float(r @ r)
        accepted = False
        for _ in range(40):
            try:
                cho = scipy.linalg.cho_factor(JTJ + lam * np.diag(diag))
                step = scipy.linalg.cho_solve(cho, g)
            except (np.linalg.LinAlgError, ValueError) as exc:
                raise SolverBreakdownError(
                    f"damped normal equations failed at iteration {it}: {exc}",
                    {"iteration": it, "lambda": lam, "residual_sup": _sup(r[:-1])},
                ) from exc
            x_new = x - step
            r_new = stacked(x_new)
            if np.all(np.isfinite(r_new)) and float(r_new @ r_new) < cost:
                x, r = x_new, r_new
                lam = max(lam / cfg.lm_scale, 1e-15)
                accepted = True
                break
            lam *= cfg.lm_scale
        it += 1
        logger.debug("iter %d: residual_sup=%.3e lambda=%.1e", it, _sup(r[:-1]), lam)
        converged = _sup(r[:-1]) <= cfg.residual_tol
        if not accepted:
            logger.info("LM stalled at iteration %d (residual_sup=%.3e)", it, _sup(r[:-1]))
            break
    result = _finish(f, x, system, it, converged, cfg, anchor_grad)
    if singular_values:
        J = residual_jacobian(f, result.loop, cfg.fd_jacobian_eps, anchor=anchor_grad)
        result.smallest_singular = float(np.linalg.svd(J, compute_uv=False)[-1])
    return result


def inflate_seed(loop, factor=1.5):
    """Scale a loop about its mean; a manual re-seed after landing on a constant loop."""
    V = loop.values
    mean = V.mean(axis=0)
    return loop.with_values(mean + factor * (V - mean))


def _rk4_step(H, x, h):
    k1 = ham_vector_field(H, x)
    k2 = ham_vector_field(H, x + 0.5 * h * k1)
    k3 = ham_vector_field(H, x + 0.5 * h * k2)
    k4 = ham_vector_field(H, x + h * k3)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_classical(H, x0, T, steps):
    """Fixed-step RK4 for ``ẋ = X_H(x)``; returns the ``(steps + 1, 2n)`` trajectory."""
    if steps < 1 or not T > 0:
        raise ValueError("need steps >= 1 and T > 0")
    h = T / steps
    traj = np.empty((steps + 1, H.dim))
    traj[0] = np.asarray(x0, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(steps):
            traj[i + 1] = _rk4_step(H, traj[i], h)
            if not np.all(np.isfinite(traj[i + 1])):
                raise BlowUpError(f"state became non-finite at step {i + 1}", i + 1)
    return traj


def continue_in_tau(f_builder, s_path, seed, cfg=None):
    """Natural-parameter continuation in the delay.

    Each converged orbit seeds the next delay. The branch stops at the first
    non-converged solve, which is included as the last entry.
    """
    cfg = cfg or SolverConfig()
    steps = [s.steps if isinstance(s, DelayShift) else DelayShift(s).steps for s in s_path]
    if not steps or steps[0] != 0:
        raise ModelSpecError("the delay path must start at 0")
    branch = []
    current = seed
    for s in steps:
        result = solve_periodic(f_builder(s), current, cfg)
        branch.append(result)
        if not result.converged:
            break
        current = result.loop
    return branch


def energy_ratio(result):
    """``energy_std / (1 + |energy_mean|)``, or ``nan`` when no energy was recorded."""
    if result.energy_std is None:
        return math.nan
    return result.energy_std / (1 + abs(result.energy_mean))
