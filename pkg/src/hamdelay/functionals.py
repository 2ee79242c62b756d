"""Delay action functionals: values, L^2 gradients and critical-point residuals.

Every functional has the form ``A(v) = S(v) - (Hamiltonian delay term)`` with
the symplectic term ``S(v) = -∫ p·q̇ dt`` discretized spectrally. The sign
of ``S`` is the one that makes the critical points of ``A`` the solutions of
``v̇ = X(v)`` with ``X_H = J grad H`` (see :mod:`hamdelay.symplectic`); with
it the L^2 gradient and the residual ``R = v̇ - X(v)`` satisfy

    grad A = J^{-1} R = -J R.

Four families are provided:

* :class:`SumProductFunctional`   ``F + sum_i H_i(v(t)) K_i(v(t - tau))``
* :class:`DoubleTimeProductFunctional`   ``∫∫ H_{t,tau}(v(t)) K_{t,tau}(v(t - tau))``
* :class:`ExponentialFunctional`   ``∫ exp(∫ H_tau(v(t - tau)) dtau) dt``
* :class:`TwoInputFunctional`   ``∫ H(v(t), v(t + tau)) dt``

Delays are grid steps; ``t + tau`` is a cyclic shift by ``-s``.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from . import kernels
from .errors import DimensionError
from .loop_space import DelayShift, Loop, as_shift, derivative, grid_times, l2_inner, quadrature
from .symplectic import (
    HamiltonianField,
    TimeDelayFamily,
    TwoInputHamiltonian,
    complex_structure,
    complex_structure_inverse,
)


def _loop_values(v, dim):
    vals = v.values if isinstance(v, Loop) else np.asarray(v, dtype=float)
    if vals.ndim != 2 or vals.shape[1] != dim:
        raise DimensionError(f"loop of shape {vals.shape} for a functional on R^{dim}")
    return vals


def symplectic_term(V):
    """``-(1/N) sum_k p_k · (Dq)_k``."""
    n = V.shape[1] // 2
    Dq = derivative(V[:, :n])
    return -quadrature(np.sum(V[:, n:] * Dq, axis=1))


class _Functional:
    dim: int

    def hamiltonian_term(self, V):
        raise NotImplementedError

    def hamiltonian_gradient(self, V):
        """L^2 gradient of the Hamiltonian term, an ``(N, 2n)`` array."""
        raise NotImplementedError

    def check_grid(self, N):
        pass

    def _values(self, v):
        V = _loop_values(v, self.dim)
        self.check_grid(V.shape[0])
        return V

    def action_values(self, V):
        return symplectic_term(V) - self.hamiltonian_term(V)

    def residual_values(self, V):
        return derivative(V) - complex_structure(self.hamiltonian_gradient(V))

    def action(self, v) -> float:
        return self.action_values(self._values(v))

    def residual(self, v) -> np.ndarray:
        """``v̇(t_k) - RHS(t_k)`` at every grid point."""
        return self.residual_values(self._values(v))

    def gradient(self, v, flip_j=False) -> np.ndarray:
        """L^2 gradient of the action, assembled from the residual.

        ``flip_j`` uses the wrong rotation; it exists so that the gradient
        audit can be shown to catch a sign error.
        """
        R = self.residual(v)
        return complex_structure(R) if flip_j else complex_structure_inverse(R)

    @property
    def autonomous(self) -> bool:
        return True

    @property
    def delay_steps(self):
        return None


@dataclass(frozen=True, eq=False)
class ClassicalFunctional(_Functional):
    """``∫ -p·q̇ - H(v)``; critical points solve ``v̇ = X_H(v)``."""

    H: HamiltonianField

    @property
    def dim(self):
        return self.H.dim

    def hamiltonian_term(self, V):
        return quadrature(self.H.value(V))

    def hamiltonian_gradient(self, V):
        return self.H.gradient(V)


@dataclass(frozen=True, eq=False)
class SumProductFunctional(_Functional):
    """Family A: ``F(v(t)) + sum_i H_i(v(t)) K_i(v(t - tau))``."""

    F: HamiltonianField
    pairs: Sequence[Tuple[HamiltonianField, HamiltonianField]] = ()
    delay: DelayShift = field(default_factory=lambda: DelayShift(0))

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        object.__setattr__(self, "delay", as_shift(self.delay))
        for H, K in self.pairs:
            if H.dim != self.F.dim or K.dim != self.F.dim:
                raise DimensionError("all fields of a sum-product functional must share one dimension")

    @property
    def dim(self):
        return self.F.dim

    @property
    def delay_steps(self):
        return self.delay.steps

    def check_grid(self, N):
        self.delay.check(N)

    def hamiltonian_term(self, V):
        s = self.delay.steps
        density = self.F.value(V)
        for H, K in self.pairs:
            density = density + H.value(V) * np.roll(K.value(V), s)
        return quadrature(density)

    def hamiltonian_gradient(self, V):
        s = self.delay.steps
        G = np.array(self.F.gradient(V), dtype=float)
        for H, K in self.pairs:
            G += np.roll(H.value(V), -s)[:, None] * K.gradient(V)
            G += np.roll(K.value(V), s)[:, None] * H.gradient(V)
        return G


def _product_grid(N):
    idx = np.arange(N)
    t = grid_times(N)
    fwd = (idx[None, :] + idx[:, None]) % N  # [s, k] -> k + s
    return t, t[fwd], t[:, None]


@dataclass(frozen=True, eq=False)
class DoubleTimeProductFunctional(_Functional):
    """Family B: ``∫∫ H_{t,tau}(v(t)) K_{t,tau}(v(t - tau)) dtau dt``.

    The tau-integral uses the loop grid, so it costs O(N^2) evaluations.
    """

    H: TimeDelayFamily
    K: TimeDelayFamily

    def __post_init__(self):
        if self.H.dim != self.K.dim:
            raise DimensionError("H and K must share one dimension")

    @property
    def dim(self):
        return self.H.dim

    @property
    def autonomous(self):
        return self.H.autonomous and self.K.autonomous

    def _tables(self, V):
        N = V.shape[0]
        t, t_fwd, taus = _product_grid(N)
        X = V[None, :, :]
        # [s, j]: H(v_j, t_j, tau_s) and K(v_j, t_{j+s}, tau_s)
        H_diag = self.H.value(X, t[None, :], taus)
        K_fwd = self.K.value(X, t_fwd, taus)
        return t, t_fwd, taus, H_diag, K_fwd

    def hamiltonian_term(self, V):
        N = V.shape[0]
        _, _, _, H_diag, K_fwd = self._tables(V)
        idx = np.arange(N)
        bwd = (idx[None, :] - idx[:, None]) % N
        K_lag = np.take_along_axis(K_fwd, bwd, axis=1)  # K(v_{k-s}, t_k, tau_s)
        return quadrature(quadrature((H_diag * K_lag).T))

    def hamiltonian_gradient(self, V):
        t, t_fwd, taus, H_diag, K_fwd = self._tables(V)
        X = V[None, :, :]
        grad_K = self.K.gradient_x(X, t_fwd, taus)  # [s, k]: grad K(v_k, t_{k+s}, tau_s)
        grad_H = self.H.gradient_x(X, t[None, :], taus)  # [s, k]: grad H(v_k, t_k, tau_s)
        return kernels.lagged_weighted_sum(H_diag, grad_K, 1) + kernels.lagged_weighted_sum(K_fwd, grad_H, -1)


@dataclass(frozen=True, eq=False)
class ExponentialFunctional(_Functional):
    """Family C: ``∫ exp[∫ H_tau(v(t - tau)) dtau] dt`` with ``H`` independent of t."""

    H: TimeDelayFamily

    def __post_init__(self):
        if not self.H.t_independent and not _sampled_t_independent(self.H):
            raise ValueError(f"{self.H.name} depends on t; the exponential functional needs H_tau only")

    @property
    def dim(self):
        return self.H.dim

    @property
    def autonomous(self):
        return True

    def inner_sums(self, V):
        """``W_k = (1/N) sum_s H_{tau_s}(v_{k-s})``."""
        N = V.shape[0]
        taus = grid_times(N)[:, None]
        table = self.H.value(V[None, :, :], 0.0, taus)  # [s, j]
        return kernels.skew_diagonal_mean(table, -1)

    def hamiltonian_term(self, V):
        return quadrature(np.exp(self.inner_sums(V)))

    def hamiltonian_gradient(self, V):
        N = V.shape[0]
        E = np.exp(self.inner_sums(V))
        taus = grid_times(N)[:, None]
        grads = self.H.gradient_x(V[None, :, :], 0.0, taus)  # [sigma, k]
        return kernels.lagged_weighted_sum(np.tile(E, (N, 1)), grads, 1)


def _sampled_t_independent(family, tol=1e-12):
    x = np.linspace(-0.7, 0.9, family.dim)
    base = family.value(x, 0.0, 0.3)
    return all(abs(family.value(x, t, 0.3) - base) <= tol * (1 + abs(base)) for t in (0.25, 0.5, 0.8))


@dataclass(frozen=True, eq=False)
class TwoInputFunctional(_Functional):
    """Family D: ``∫ H(v(t), v(t + tau)) dt``."""

    H: TwoInputHamiltonian
    delay: DelayShift = field(default_factory=lambda: DelayShift(0))

    def __post_init__(self):
        object.__setattr__(self, "delay", as_shift(self.delay))

    @property
    def dim(self):
        return self.H.dim

    @property
    def delay_steps(self):
        return self.delay.steps

    def check_grid(self, N):
        self.delay.check(N)

    def hamiltonian_term(self, V):
        return quadrature(self.H.value(V, np.roll(V, -self.delay.steps, axis=0)))

    def hamiltonian_gradient(self, V):
        s = self.delay.steps
        return self.H.grad1(V, np.roll(V, -s, axis=0)) + self.H.grad2(np.roll(V, s, axis=0), V)


DelayFunctional = (SumProductFunctional, DoubleTimeProductFunctional, ExponentialFunctional, TwoInputFunctional)


def classical_residual(H, v):
    """``v̇ - X_H(v)`` for an autonomous Hamiltonian."""
    return ClassicalFunctional(H).residual(v)


def energy_trace(H, v):
    """``H(v_k)`` at every grid point."""
    V = _loop_values(v, H.dim)
    return np.asarray(H.value(V), dtype=float)


def action(f, v):
    return f.action(v)


def residual(f, v):
    return f.residual(v)


def grad_action(f, v, flip_j=False):
    return f.gradient(v, flip_j=flip_j)


def directional_derivative_error(f, v, v_hat, eps=1e-5, flip_j=False):
    """``|central difference of the action along v_hat - <grad, v_hat>|``."""
    V = v.values if isinstance(v, Loop) else np.asarray(v, dtype=float)
    fd = (f.action(V + eps * v_hat) - f.action(V - eps * v_hat)) / (2 * eps)
    return abs(fd - l2_inner(f.gradient(V, flip_j=flip_j), v_hat))


class ResidualSystem:
    """Flat root-finding target for a functional on loops of shape ``(N, 2n)``."""

    def __init__(self, functional, n, N):
        if functional.dim != 2 * n:
            raise DimensionError(f"functional on R^{functional.dim} used with n={n}")
        functional.check_grid(N)
        self.functional = functional
        self.n = n
        self.N = N

    @property
    def shape(self):
        return (self.N, 2 * self.n)

    @property
    def size(self):
        return self.N * 2 * self.n

    def __call__(self, x):
        return self.functional.residual_values(np.asarray(x, dtype=float).reshape(self.shape)).ravel()

    def loop(self, x):
        return Loop(np.asarray(x, dtype=float).reshape(self.shape))
