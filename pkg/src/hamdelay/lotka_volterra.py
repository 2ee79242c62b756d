"""Delayed Lotka-Volterra systems as Hamiltonian delay equations.

Phase space R^{2N} with

    F = sum_i b_i q_i,     H_i = -exp(p_i),     K_i = exp(1/2 sum_j a_ij q_j)

and skew-symmetric ``A``. Setting ``x = q̇`` on a critical loop gives

    ẋ_i = b_i x_i + 1/2 sum_j a_ij x_i (x_j(t + tau) + x_j(t - tau)).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionError, GridTooCoarseError, NotSkewSymmetricError
from .functionals import SumProductFunctional
from .loop_space import POPULATION, DelayShift, Loop, as_shift, derivative, quadrature
from .symplectic import HamiltonianField


@dataclass(frozen=True, eq=False)
class LVModel:
    A: np.ndarray
    b: np.ndarray
    delay: DelayShift = field(default_factory=lambda: DelayShift(0))

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"interaction matrix must be square, got shape {A.shape}")
        if b.shape[0] != A.shape[0]:
            raise DimensionError(f"b has {b.shape[0]} entries for {A.shape[0]} species")
        if not np.array_equal(A, -A.T):
            raise NotSkewSymmetricError("interaction matrix must satisfy a_ji = -a_ij exactly")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "delay", as_shift(self.delay))

    @property
    def species(self) -> int:
        return self.A.shape[0]

    def with_delay(self, steps):
        return LVModel(self.A, self.b, DelayShift(steps))


def _lv_fields(m):
    n = m.species
    dim = 2 * n
    A, b = m.A, m.b

    def F_value(x):
        return np.asarray(x, dtype=float)[..., :n] @ b

    def F_grad(x):
        g = np.zeros(np.shape(x))
        g[..., :n] = b
        return g

    F = HamiltonianField(dim, F_value, F_grad, name="lv_F")

    pairs = []
    for i in range(n):
        col = n + i
        row = A[i].copy()

        def H_value(x, col=col):
            return -np.exp(np.asarray(x, dtype=float)[..., col])

        def H_grad(x, col=col):
            x = np.asarray(x, dtype=float)
            g = np.zeros(x.shape)
            g[..., col] = -np.exp(x[..., col])
            return g

        def K_value(x, row=row):
            return np.exp(0.5 * (np.asarray(x, dtype=float)[..., :n] @ row))

        def K_grad(x, row=row):
            x = np.asarray(x, dtype=float)
            g = np.zeros(x.shape)
            g[..., :n] = 0.5 * np.exp(0.5 * (x[..., :n] @ row))[..., None] * row
            return g

        pairs.append(
            (
                HamiltonianField(dim, H_value, H_grad, name=f"lv_H{i + 1}"),
                HamiltonianField(dim, K_value, K_grad, name=f"lv_K{i + 1}"),
            )
        )
    return F, pairs


def build_lv_functional(m):
    """Sum-product functional whose critical loops give the delayed LV system."""
    F, pairs = _lv_fields(m)
    return SumProductFunctional(F, pairs, m.delay)


def lv_rhs(m, x_now, x_fwd, x_bwd):
    """``b_i x_i + 1/2 sum_j a_ij x_i (x_fwd_j + x_bwd_j)`` for single states."""
    x_now, x_fwd, x_bwd = (np.asarray(a, dtype=float) for a in (x_now, x_fwd, x_bwd))
    if not (x_now.shape == x_fwd.shape == x_bwd.shape == (m.species,)):
        raise DimensionError(f"states must have length {m.species}")
    return m.b * x_now + 0.5 * x_now * (m.A @ x_fwd) + 0.5 * x_now * (m.A @ x_bwd)


def reduce_to_x(v):
    """Population loop ``x_i = q̇_i`` of a phase loop."""
    if v.grid_size < 4:
        raise GridTooCoarseError(f"need N >= 4, got N={v.grid_size}")
    return Loop(derivative(v.q), role=POPULATION)


def lv_delay_residual(m, x):
    """``ẋ(t_k) - RHS(x_k, x_{k+s}, x_{k-s})`` over a population loop."""
    X = x.values if isinstance(x, Loop) else np.asarray(x, dtype=float)
    if X.ndim != 2 or X.shape[1] != m.species:
        raise DimensionError(f"population loop must have {m.species} columns")
    s = m.delay.check(X.shape[0]).steps
    return derivative(X) - kernels.lv_rhs_loop(m.A, m.b, X, s)


def lv_half_delay_residual(m, x):
    """Residual of ``ẋ_i = b_i x_i + sum_j a_ij x_i x_j(t - 1/2)``; needs an even grid."""
    X = x.values if isinstance(x, Loop) else np.asarray(x, dtype=float)
    half = DelayShift.half(X.shape[0]).steps
    return derivative(X) - X * (m.b[None, :] + np.roll(X, half, axis=0) @ m.A.T)


def classical_lv_residual(m, x):
    """Undelayed LV residual ``ẋ_i - b_i x_i - sum_j a_ij x_i x_j``."""
    X = x.values if isinstance(x, Loop) else np.asarray(x, dtype=float)
    return derivative(X) - X * (m.b[None, :] + X @ m.A.T)


# --- diagnostic identities of the reduction ----------------------------------

def q_identity_defect(m, v):
    """``q̇_i - exp(p_i + 1/2 sum_j a_ij q_j(t - tau))`` per grid point."""
    s = m.delay.check(v.grid_size).steps
    q, p = v.q, v.p
    return derivative(q) - np.exp(p + 0.5 * np.roll(q, s, axis=0) @ m.A.T)


def p_identity_defect(m, v):
    """``ṗ_i - b_i - 1/2 sum_l a_il q̇_l(t + tau)``, with the q̇ values taken from the q-identity."""
    s = m.delay.check(v.grid_size).steps
    q, p = v.q, v.p
    qdot_model = np.exp(p + 0.5 * np.roll(q, s, axis=0) @ m.A.T)
    return derivative(p) - m.b[None, :] - 0.5 * np.roll(qdot_model, -s, axis=0) @ m.A.T


def log_growth_mean(m, x):
    """Quadrature of ``sum_i ẋ_i / x_i``; zero for skew A and b = 0 on periodic positive loops."""
    X = x.values if isinstance(x, Loop) else np.asarray(x, dtype=float)
    return quadrature(np.sum(derivative(X) / X, axis=1))


def equilibrium(m):
    """Solve ``b + A x = 0``; falls back to least squares (with a warning) for singular A."""
    try:
        if np.linalg.matrix_rank(m.A) < m.species:
            raise np.linalg.LinAlgError("singular")
        return np.linalg.solve(m.A, -m.b)
    except np.linalg.LinAlgError:
        warnings.warn("singular interaction matrix; equilibrium from least squares", RuntimeWarning, stacklevel=2)
        return np.linalg.lstsq(m.A, -m.b, rcond=None)[0]


def lift_population(m, x, q0=None):
    """Phase loop from a population loop.

    ``q`` is the periodic antiderivative of ``x - mean(x)`` and
    ``p = log x - 1/2 A q(t - tau)``. The lift is exact only when the
    returned ``drift`` (the mean of x) vanishes, which never happens for
    positive populations: ``reduce_to_x`` of the lift gives ``x - drift``.
    """
    X = x.values if isinstance(x, Loop) else np.asarray(x, dtype=float)
    N = X.shape[0]
    s = m.delay.check(N).steps
    if np.any(X <= 0):
        raise ValueError("lifting needs strictly positive populations")
    drift = X.mean(axis=0)
    coeffs = np.fft.rfft(X - drift, axis=0)
    k = np.arange(coeffs.shape[0])[:, None]
    integ = np.zeros_like(coeffs)
    integ[1:] = coeffs[1:] / (2j * np.pi * k[1:])
    if N % 2 == 0:
        integ[-1] = 0.0
    q = np.fft.irfft(integ, n=N, axis=0)
    if q0 is not None:
        q = q + np.asarray(q0, dtype=float)[None, :]
    p = np.log(X) - 0.5 * np.roll(q, s, axis=0) @ m.A.T
    return Loop(np.hstack([q, p])), drift


def seed_loop(m, N, amplitude=0.1):
    """Equilibrium-centred starting guess: small circles in each (q_i, p_i) plane around
    ``p_i = log x*_i`` (or 0 where the equilibrium is not positive)."""
    xs = equilibrium(m)
    n = m.species
    t = np.arange(N) / N
    V = np.zeros((N, 2 * n))
    V[:, n:] = np.where(xs > 0, np.log(np.abs(xs) + (xs <= 0)), 0.0)[None, :]
    for i in range(n):
        V[:, i] += amplitude * np.cos(2 * np.pi * t)
        V[:, n + i] += amplitude * np.sin(2 * np.pi * t)
    return Loop(V)
