"""Hamiltonians on R^{2n}, the complex structure and Hamiltonian vector fields.

Conventions, fixed once for the whole package::

    J(q, p) = (-p, q)        omega(a, b) = <J a, b>        X_H = J grad H

so that ``omega(X_H, .) = -dH``. The loop-space action pairs with these
through its symplectic term; see :mod:`hamdelay.functionals`.

All field callables are vectorized over leading axes: ``value`` maps an
``(..., 2n)`` array to ``(...)`` and ``gradient`` maps it to ``(..., 2n)``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError


def _check_even(dim):
    if dim <= 0 or dim % 2:
        raise DimensionError(f"phase space dimension must be even and positive, got {dim}")


def complex_structure(x):
    """Multiplication by i under R^{2n} = C^n, acting on the last axis."""
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]
    _check_even(dim)
    n = dim // 2
    return np.concatenate([-x[..., n:], x[..., :n]], axis=-1)


def complex_structure_inverse(x):
    """``J^{-1} = -J``."""
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]
    _check_even(dim)
    n = dim // 2
    return np.concatenate([x[..., n:], -x[..., :n]], axis=-1)


def omega(a, b):
    """Standard symplectic pairing ``<J a, b>`` (last axis)."""
    return np.sum(complex_structure(a) * np.asarray(b, dtype=float), axis=-1)


@dataclass(frozen=True)
class HamiltonianField:
    """Autonomous Hamiltonian with a hand-coded gradient."""

    dim: int
    value: Callable
    gradient: Callable
    name: str = "H"

    def __post_init__(self):
        _check_even(self.dim)

    def __call__(self, x):
        return self.value(x)


@dataclass(frozen=True)
class TimeDelayFamily:
    """``H_{t,tau}(x)``, 1-periodic in both ``t`` and ``tau``.

    ``value(x, t, tau)`` and ``gradient_x(x, t, tau)`` broadcast ``t`` and
    ``tau`` against the leading axes of ``x``.
    """

    dim: int
    value: Callable
    gradient_x: Callable
    name: str = "H_t_tau"
    t_independent: bool = False
    tau_independent: bool = False

    def __post_init__(self):
        _check_even(self.dim)

    @property
    def autonomous(self):
        return self.t_independent and self.tau_independent


@dataclass(frozen=True)
class TwoInputHamiltonian:
    """``H(x, y)`` on R^{2n} x R^{2n} with both partial gradients."""

    dim: int
    value: Callable
    grad1: Callable
    grad2: Callable
    name: str = "H(x,y)"

    def __post_init__(self):
        _check_even(self.dim)


def _check_point(H, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != H.dim:
        raise DimensionError(f"point of dim {x.shape[-1]} for a field of dim {H.dim}")
    return x


def ham_vector_field(H, x):
    """``X_H(x) = J grad H(x)``."""
    x = _check_point(H, x)
    return complex_structure(H.gradient(x))


def partial_vector_fields(H, x, y):
    """``(X^1_H(x, y), X^2_H(x, y))``, the Hamiltonian fields of each slot."""
    x = _check_point(H, x)
    y = _check_point(H, y)
    return complex_structure(H.grad1(x, y)), complex_structure(H.grad2(x, y))


def gradient_check(H, x, eps=1e-5):
    """Max over coordinates of ``|central difference - analytic| / (1 + |analytic|)``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = _check_point(H, x)
    analytic = np.asarray(H.gradient(x), dtype=float)
    worst = 0.0
    for j in range(H.dim):
        h = _representable_step(x[j], eps)
        e = np.zeros(H.dim)
        e[j] = h
        fd = (float(H.value(x + e)) - float(H.value(x - e))) / (2 * h)
        worst = max(worst, abs(fd - analytic[j]) / (1 + abs(analytic[j])))
    return worst


def _representable_step(xj, eps):
    # x + h is then exact, which removes the step's own rounding from the difference
    h = (xj + eps) - xj
    return h if h > 0 else eps


# ---------------------------------------------------------------------------
# field constructors
# ---------------------------------------------------------------------------

def constant_field(dim, c=0.0):
    c = float(c)
    return HamiltonianField(
        dim,
        lambda x: np.full(np.shape(x)[:-1], c),
        lambda x: np.zeros(np.shape(x)),
        name=f"const({c:g})",
    )


def harmonic(dim, a=1.0):
    """``a (|q|^2 + |p|^2)``."""
    a = float(a)
    return HamiltonianField(
        dim,
        lambda x: a * np.sum(np.square(x), axis=-1),
        lambda x: 2.0 * a * np.asarray(x, dtype=float),
        name=f"harmonic({a:g})",
    )


def quartic(dim, a=1.0):
    """``a (|q|^2 + |p|^2)^2``."""
    a = float(a)

    def grad(x):
        x = np.asarray(x, dtype=float)
        return 4.0 * a * np.sum(x * x, axis=-1)[..., None] * x

    return HamiltonianField(
        dim, lambda x: a * np.sum(np.square(x), axis=-1) ** 2, grad, name=f"quartic({a:g})"
    )


def linear_q(dim, b):
    """``sum_i b_i q_i``."""
    n = dim // 2
    b = np.broadcast_to(np.asarray(b, dtype=float), (n,)).copy()
    g = np.concatenate([b, np.zeros(n)])

    return HamiltonianField(
        dim,
        lambda x: np.asarray(x, dtype=float)[..., :n] @ b,
        lambda x: np.broadcast_to(g, np.shape(x)).copy(),
        name="linear(" + ",".join(f"{v:g}" for v in b) + ")",
    )


def exp_p(dim, i):
    """``exp(p_i)``, with ``i`` 1-based."""
    n = dim // 2
    if not 1 <= i <= n:
        raise DimensionError(f"index {i} out of range 1..{n}")
    col = n + i - 1

    def grad(x):
        x = np.asarray(x, dtype=float)
        g = np.zeros(x.shape)
        g[..., col] = np.exp(x[..., col])
        return g

    return HamiltonianField(dim, lambda x: np.exp(np.asarray(x, dtype=float)[..., col]), grad, name=f"exp_p({i})")


def exp_half_aq(dim, i, A):
    """``exp(1/2 sum_j a_ij q_j)``, with ``i`` 1-based and ``A`` an n x n matrix."""
    n = dim // 2
    A = np.asarray(A, dtype=float)
    if A.shape != (n, n):
        raise DimensionError(f"matrix shape {A.shape} does not match n={n}")
    if not 1 <= i <= n:
        raise DimensionError(f"index {i} out of range 1..{n}")
    row = A[i - 1].copy()

    def value(x):
        return np.exp(0.5 * (np.asarray(x, dtype=float)[..., :n] @ row))

    def grad(x):
        x = np.asarray(x, dtype=float)
        g = np.zeros(x.shape)
        g[..., :n] = 0.5 * value(x)[..., None] * row
        return g

    return HamiltonianField(dim, value, grad, name=f"exp_halfAq({i})")


def scaled(c, H):
    c = float(c)
    return HamiltonianField(
        H.dim, lambda x: c * H.value(x), lambda x: c * H.gradient(x), name=f"scale({c:g};{H.name})"
    )


def field_sum(*fields):
    dim = fields[0].dim
    if any(f.dim != dim for f in fields):
        raise DimensionError("fields of different dimensions")

    def value(x):
        return sum(f.value(x) for f in fields)

    def grad(x):
        return sum(f.gradient(x) for f in fields)

    return HamiltonianField(dim, value, grad, name="sum(" + ",".join(f.name for f in fields) + ")")


def field_product(G, L):
    """``G L`` with the product-rule gradient."""
    if G.dim != L.dim:
        raise DimensionError("fields of different dimensions")

    def grad(x):
        return G.value(x)[..., None] * L.gradient(x) + L.value(x)[..., None] * G.gradient(x)

    return HamiltonianField(G.dim, lambda x: G.value(x) * L.value(x), grad, name=f"prod({G.name},{L.name})")


def field_square(H):
    return field_product(H, H)


# ---------------------------------------------------------------------------
# time-delay families
# ---------------------------------------------------------------------------

def autonomous_family(H):
    """Lift an autonomous field to ``H_{t,tau} = H``."""

    def value(x, t, tau):
        v = H.value(x)
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(v), np.shape(t), np.shape(tau))).copy()

    def grad(x, t, tau):
        g = H.gradient(x)
        shape = np.broadcast_shapes(np.shape(g)[:-1], np.shape(t), np.shape(tau)) + (H.dim,)
        return np.broadcast_to(g, shape).copy()

    return TimeDelayFamily(H.dim, value, grad, name=H.name, t_independent=True, tau_independent=True)


def modulated_family(H, a_t=0.0, a_tau=0.0):
    """``(1 + a_t sin 2πt + a_tau cos 2π(t + tau)) H(x)``."""
    a_t, a_tau = float(a_t), float(a_tau)

    def factor(t, tau):
        t = np.asarray(t, dtype=float)
        tau = np.asarray(tau, dtype=float)
        return 1.0 + a_t * np.sin(2 * np.pi * t) + a_tau * np.cos(2 * np.pi * (t + tau))

    def value(x, t, tau):
        return factor(t, tau) * H.value(x)

    def grad(x, t, tau):
        return factor(t, tau)[..., None] * H.gradient(x)

    return TimeDelayFamily(
        H.dim,
        value,
        grad,
        name=f"modulated({H.name};{a_t:g},{a_tau:g})",
        t_independent=(a_t == 0.0 and a_tau == 0.0),
        tau_independent=(a_tau == 0.0),
    )


def tau_modulated_family(H, a_tau=0.0):
    """``(1 + a_tau cos 2π tau) H(x)``; independent of t."""
    a_tau = float(a_tau)

    def value(x, t, tau):
        return (1.0 + a_tau * np.cos(2 * np.pi * np.asarray(tau, dtype=float))) * H.value(x)

    def grad(x, t, tau):
        f = 1.0 + a_tau * np.cos(2 * np.pi * np.asarray(tau, dtype=float))
        return f[..., None] * H.gradient(x)

    return TimeDelayFamily(
        H.dim, value, grad, name=f"taumod({H.name};{a_tau:g})", t_independent=True, tau_independent=(a_tau == 0.0)
    )


# ---------------------------------------------------------------------------
# two-input Hamiltonians
# ---------------------------------------------------------------------------

def pair_coupling(dim):
    """``<x, y>``."""
    _check_even(dim)
    return TwoInputHamiltonian(
        dim,
        lambda x, y: np.sum(np.asarray(x, dtype=float) * np.asarray(y, dtype=float), axis=-1),
        lambda x, y: np.broadcast_to(np.asarray(y, dtype=float), np.broadcast_shapes(np.shape(x), np.shape(y))).copy(),
        lambda x, y: np.broadcast_to(np.asarray(x, dtype=float), np.broadcast_shapes(np.shape(x), np.shape(y))).copy(),
        name="pair_coupling",
    )


def separable(H1, H2):
    """``H1(x) + H2(y)``."""
    if H1.dim != H2.dim:
        raise DimensionError("fields of different dimensions")
    return TwoInputHamiltonian(
        H1.dim,
        lambda x, y: H1.value(x) + H2.value(y),
        lambda x, y: H1.gradient(x) + 0.0 * np.asarray(y, dtype=float),
        lambda x, y: H2.gradient(y) + 0.0 * np.asarray(x, dtype=float),
        name=f"separable({H1.name},{H2.name})",
    )


def cross_product(G, L):
    """``G(x) L(y)``."""
    if G.dim != L.dim:
        raise DimensionError("fields of different dimensions")
    return TwoInputHamiltonian(
        G.dim,
        lambda x, y: G.value(x) * L.value(y),
        lambda x, y: L.value(y)[..., None] * G.gradient(x),
        lambda x, y: G.value(x)[..., None] * L.gradient(y),
        name=f"cross({G.name},{L.name})",
    )


def two_input_gradient_check(H, x, y, eps=1e-5):
    """Like :func:`gradient_check`, over both slots."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    g1 = np.asarray(H.grad1(x, y), dtype=float)
    g2 = np.asarray(H.grad2(x, y), dtype=float)
    worst = 0.0
    for j in range(H.dim):
        e = np.zeros(H.dim)
        e[j] = eps
        fd1 = (float(H.value(x + e, y)) - float(H.value(x - e, y))) / (2 * eps)
        fd2 = (float(H.value(x, y + e)) - float(H.value(x, y - e))) / (2 * eps)
        worst = max(worst, abs(fd1 - g1[j]) / (1 + abs(g1[j])), abs(fd2 - g2[j]) / (1 + abs(g2[j])))
    return worst
