"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and the environment variable
``HAMDELAY_DISABLE_NUMBA`` is unset (or ``0``). Both paths sum in the same
order, so they agree to rounding and each is bit-deterministic.

Kernels
-------
circulant_apply
    ``out[k] = sum_m d[m] * V[(k - m) % N]`` for an antisymmetric stencil
    (``d[N - m] = -d[m]``), summed in pairs as
    ``sum_{0 < m < N/2} d[m] * (V[k - m] - V[k + m])`` so constants map to
    exact zeros; spectral differentiation.
lagged_weighted_sum
    ``out[k] = (1/N) sum_s W[s, (k + lag*s) % N] * G[s, k]``; the tau-sums of
    the double-time and exponential functionals.
skew_diagonal_mean
    ``out[k] = (1/N) sum_s M[s, (k + lag*s) % N]``.
lv_rhs_loop
    Right-hand side of the delayed Lotka-Volterra system over a whole loop.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _env_disabled():
    return os.environ.get("HAMDELAY_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def circulant_apply_numpy(d, V):
    N = V.shape[0]
    out = np.zeros_like(V)
    for m in range(1, (N + 1) // 2):
        out += d[m] * (np.roll(V, m, axis=0) - np.roll(V, -m, axis=0))
    return out


def lagged_weighted_sum_numpy(W, G, lag):
    N = W.shape[1]
    k = np.arange(N)
    out = np.zeros((N, G.shape[2]))
    for s in range(W.shape[0]):
        out += W[s, (k + lag * s) % N][:, None] * G[s]
    return out / N


def skew_diagonal_mean_numpy(M, lag):
    N = M.shape[1]
    k = np.arange(N)
    out = np.zeros(N)
    for s in range(M.shape[0]):
        out += M[s, (k + lag * s) % N]
    return out / N


def lv_rhs_loop_numpy(A, b, x, s):
    coupling = 0.5 * (np.roll(x, -s, axis=0) + np.roll(x, s, axis=0)) @ A.T
    return x * (b[None, :] + coupling)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _circulant_apply_loops(d, V):
    N, C = V.shape
    out = np.zeros((N, C))
    for m in range(1, (N + 1) // 2):
        dm = d[m]
        for k in range(N):
            back = (k - m) % N
            fwd = (k + m) % N
            for c in range(C):
                out[k, c] += dm * (V[back, c] - V[fwd, c])
    return out


def _lagged_weighted_sum_loops(W, G, lag):
    S, N = W.shape
    C = G.shape[2]
    out = np.zeros((N, C))
    for s in range(S):
        for k in range(N):
            w = W[s, (k + lag * s) % N]
            for c in range(C):
                out[k, c] += w * G[s, k, c]
    return out / N


def _skew_diagonal_mean_loops(M, lag):
    S, N = M.shape
    out = np.zeros(N)
    for s in range(S):
        for k in range(N):
            out[k] += M[s, (k + lag * s) % N]
    return out / N


def _lv_rhs_loop_loops(A, b, x, s):
    N, n = x.shape
    out = np.empty((N, n))
    for k in range(N):
        fwd = (k + s) % N
        bwd = (k - s) % N
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += A[i, j] * (0.5 * (x[fwd, j] + x[bwd, j]))
            out[k, i] = x[k, i] * (b[i] + acc)
    return out


if HAVE_NUMBA:
    circulant_apply_numba = numba.njit(cache=True)(_circulant_apply_loops)
    lagged_weighted_sum_numba = numba.njit(cache=True)(_lagged_weighted_sum_loops)
    skew_diagonal_mean_numba = numba.njit(cache=True)(_skew_diagonal_mean_loops)
    lv_rhs_loop_numba = numba.njit(cache=True)(_lv_rhs_loop_loops)
else:  # pragma: no cover
    circulant_apply_numba = None
    lagged_weighted_sum_numba = None
    skew_diagonal_mean_numba = None
    lv_rhs_loop_numba = None


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def circulant_apply(d, V):
    d, V = _f64(d), _f64(V)
    if USE_NUMBA:
        return circulant_apply_numba(d, V)
    return circulant_apply_numpy(d, V)


def lagged_weighted_sum(W, G, lag):
    W, G = _f64(W), _f64(G)
    if USE_NUMBA:
        return lagged_weighted_sum_numba(W, G, int(lag))
    return lagged_weighted_sum_numpy(W, G, int(lag))


def skew_diagonal_mean(M, lag):
    M = _f64(M)
    if USE_NUMBA:
        return skew_diagonal_mean_numba(M, int(lag))
    return skew_diagonal_mean_numpy(M, int(lag))


def lv_rhs_loop(A, b, x, s):
    A, b, x = _f64(A), _f64(b), _f64(x)
    if USE_NUMBA:
        return lv_rhs_loop_numba(A, b, x, int(s))
    return lv_rhs_loop_numpy(A, b, x, int(s))
