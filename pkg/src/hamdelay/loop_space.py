"""Discretized 1-periodic loops in R^{2n} on the uniform grid t_k = k/N.

Tangent vectors (variations, residuals, gradients) are plain ``(N, 2n)``
arrays; :class:`Loop` is reserved for points of the loop space.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DimensionError, GridTooCoarseError, InvalidDelayError

PHASE = "phase"
POPULATION = "population"


@dataclass(frozen=True, eq=False)
class Loop:
    """N samples of a 1-periodic curve.

    ``role="phase"`` loops live in R^{2n} with columns ``(q_1..q_n, p_1..p_n)``.
    ``role="population"`` loops carry Lotka-Volterra populations and have no
    (q, p) split.
    """

    values: np.ndarray
    role: str = PHASE

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"loop values must be an (N, d) array, got shape {arr.shape}")
        if self.role not in (PHASE, POPULATION):
            raise ValueError(f"unknown loop role {self.role!r}")
        if self.role == PHASE and arr.shape[1] % 2:
            raise DimensionError(f"phase loop needs an even number of columns, got {arr.shape[1]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("loop values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def grid_size(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def half_dim(self) -> int:
        if self.role != PHASE:
            raise DimensionError("population loops have no (q, p) split")
        return self.values.shape[1] // 2

    @property
    def q(self):
        return self.values[:, : self.half_dim]

    @property
    def p(self):
        return self.values[:, self.half_dim :]

    @property
    def times(self):
        return grid_times(self.grid_size)

    def with_values(self, values):
        return Loop(values, role=self.role)

    def __repr__(self):
        return f"Loop(role={self.role!r}, N={self.grid_size}, dim={self.dim})"

    @classmethod
    def from_function(cls, func, N, role=PHASE):
        """Sample ``func(t) -> array`` at ``t_k = k/N`` (``func`` is vectorized in t)."""
        t = grid_times(N)
        return cls(np.asarray(func(t), dtype=float).reshape(N, -1), role=role)

    @classmethod
    def constant(cls, point, N, role=PHASE):
        point = np.asarray(point, dtype=float)
        return cls(np.tile(point, (N, 1)), role=role)

    @classmethod
    def circle(cls, radius, N, n=1, center=None, turns=1):
        """Circle in the (q_1, p_1) plane, ``q_1 = r cos 2πt``, ``p_1 = r sin 2πt``."""
        t = grid_times(N)
        vals = np.zeros((N, 2 * n))
        if center is not None:
            vals += np.asarray(center, dtype=float)[None, :]
        vals[:, 0] += radius * np.cos(2 * np.pi * turns * t)
        vals[:, n] += radius * np.sin(2 * np.pi * turns * t)
        return cls(vals)


@dataclass(frozen=True)
class DelayShift:
    """A grid-commensurate delay ``tau = steps / N``."""

    steps: int

    def __post_init__(self):
        if isinstance(self.steps, bool) or int(self.steps) != self.steps:
            raise InvalidDelayError(f"delay steps must be an integer, got {self.steps!r}")
        if self.steps < 0:
            raise InvalidDelayError(f"delay steps must be >= 0, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    def tau(self, N):
        self.check(N)
        return self.steps / N

    def check(self, N):
        if self.steps >= N:
            raise InvalidDelayError(f"delay of {self.steps} steps does not fit a grid of N={N}")
        return self

    @classmethod
    def from_tau(cls, tau, N):
        s = tau * N
        steps = int(round(s))
        if not math.isclose(s, steps, rel_tol=0.0, abs_tol=1e-9):
            raise InvalidDelayError(f"tau={tau} is not a multiple of 1/N for N={N}")
        return cls(steps % N if steps == N else steps).check(N)

    @classmethod
    def half(cls, N):
        if N % 2:
            raise InvalidDelayError(f"tau=1/2 needs an even grid, got N={N}")
        return cls(N // 2)


def as_shift(s):
    return s if isinstance(s, DelayShift) else DelayShift(s)


def grid_times(N):
    return np.arange(N) / N


def _values(v):
    return v.values if isinstance(v, Loop) else np.asarray(v, dtype=float)


def shift(v, s):
    """Delay a loop: ``result[k] = v[(k - s) mod N]``, i.e. ``t -> v(t - tau)``.

    Accepts a :class:`Loop` (returns a Loop) or an ``(N, d)`` array.
    """
    s = as_shift(s)
    vals = _values(v)
    s.check(vals.shape[0])
    out = np.roll(vals, s.steps, axis=0)
    return v.with_values(out) if isinstance(v, Loop) else out


@lru_cache(maxsize=64)
def _derivative_stencil(N):
    # first column of the Fourier differentiation matrix on [0, 1)
    m = np.arange(1, N // 2 + 1)
    sign = np.where(m % 2, -1.0, 1.0)
    if N % 2 == 0:
        half = np.pi * sign / np.tan(np.pi * m / N)
        half[-1] = 0.0  # Nyquist mode: derivative set to zero
    else:
        half = np.pi * sign / np.sin(np.pi * m / N)
    d = np.zeros(N)
    d[1 : N // 2 + 1] = half
    d[N - m] = -half
    if N % 2 == 0:
        d[N // 2] = 0.0
    d.setflags(write=False)
    return d


def derivative_stencil(N):
    """Stencil ``d`` with ``(Dv)_k = sum_m d[m] v_{k-m}``; antisymmetric, ``d[N-m] = -d[m]``."""
    if N < 4:
        raise GridTooCoarseError(f"spectral differentiation needs N >= 4, got N={N}")
    return _derivative_stencil(N)


def derivative(v):
    """Spectral derivative of each coordinate.

    Applied as an explicit circulant sum so that it commutes bit-exactly with
    :func:`shift`. Exact on trigonometric polynomials of degree < N/2; the
    Nyquist mode (even N) is mapped to zero.
    """
    vals = _values(v)
    return kernels.circulant_apply(derivative_stencil(vals.shape[0]), vals)


def quadrature(samples):
    """Periodic trapezoid rule ``(1/N) sum_k samples[k]``.

    Uses a correctly rounded sum, so the result does not depend on the order
    of the samples (cyclic shifts included). A 2-D input is integrated
    column by column.
    """
    a = np.asarray(samples, dtype=float)
    if a.shape[0] < 1:
        raise ValueError("quadrature needs at least one sample")
    N = a.shape[0]
    if a.ndim == 1:
        return math.fsum(a) / N
    flat = a.reshape(N, -1)
    out = np.array([math.fsum(flat[:, c]) for c in range(flat.shape[1])]) / N
    return out.reshape(a.shape[1:])


def l2_inner(a, b):
    """``(1/N) sum_k <a_k, b_k>``."""
    a, b = _values(a), _values(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return math.fsum((a * b).ravel()) / a.shape[0]


def l2_norm(a):
    return math.sqrt(l2_inner(a, a))


def loop_average(H, v):
    """Loop average ``(1/N) sum_k H(v_k)`` of a Hamiltonian."""
    vals = _values(v)
    if H.dim != vals.shape[1]:
        raise DimensionError(f"field dim {H.dim} does not match loop dim {vals.shape[1]}")
    return quadrature(H.value(vals))


def spectral_decay(v):
    """Magnitude of the Fourier coefficients per wavenumber, summed over coordinates.

    A smoothness diagnostic: for a well-resolved loop the tail is near
    machine precision.
    """
    vals = _values(v)
    coeffs = np.abs(np.fft.rfft(vals, axis=0)) / vals.shape[0]
    return coeffs.sum(axis=1)
