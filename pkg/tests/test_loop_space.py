import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hamdelay import registry
from hamdelay.errors import DimensionError, GridTooCoarseError, InvalidDelayError
from hamdelay.loop_space import (
    DelayShift,
    Loop,
    derivative,
    grid_times,
    l2_inner,
    loop_average,
    quadrature,
    shift,
    spectral_decay,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def loops(min_N=4, max_N=24, cols=2):
    return st.integers(min_N, max_N).flatmap(lambda N: arrays(np.float64, (N, cols), elements=finite))


# --- Loop / DelayShift -------------------------------------------------------

def test_loop_is_immutable():
    v = Loop(np.zeros((8, 2)))
    with pytest.raises(ValueError):
        v.values[0, 0] = 1.0


def test_loop_rejects_nonfinite_and_odd_phase_dim():
    with pytest.raises(ValueError):
        Loop(np.array([[0.0, np.nan]]))
    with pytest.raises(DimensionError):
        Loop(np.zeros((8, 3)))
    assert Loop(np.zeros((8, 3)), role="population").dim == 3


def test_loop_fields():
    v = Loop(np.arange(24.0).reshape(6, 4))
    assert (v.half_dim, v.grid_size) == (2, 6)
    np.testing.assert_array_equal(v.q, v.values[:, :2])
    np.testing.assert_array_equal(v.p, v.values[:, 2:])


def test_delay_from_tau():
    assert DelayShift.from_tau(0.5, 64).steps == 32
    assert DelayShift.half(10).steps == 5
    with pytest.raises(InvalidDelayError):
        DelayShift.half(9)
    with pytest.raises(InvalidDelayError):
        DelayShift.from_tau(0.3, 64)
    with pytest.raises(InvalidDelayError):
        DelayShift(-1)


# --- shift -------------------------------------------------------------------

def test_shift_examples():
    v = Loop(np.array([[1.0, 10], [2, 20], [3, 30], [4, 40]]))
    np.testing.assert_array_equal(shift(v, 0).values, v.values)
    np.testing.assert_array_equal(shift(v, 1).values[:, 0], [4, 1, 2, 3])
    c = Loop.constant([0.3, -2.0], 9)
    for s in range(9):
        np.testing.assert_array_equal(shift(c, s).values, c.values)


def test_shift_rejects_delay_beyond_grid():
    with pytest.raises(InvalidDelayError):
        shift(Loop(np.zeros((4, 2))), 4)


@settings(max_examples=60, deadline=None)
@given(loops(), st.data())
def test_shift_group_action(V, data):
    N = V.shape[0]
    s1 = data.draw(st.integers(0, N - 1))
    s2 = data.draw(st.integers(0, N - 1))
    np.testing.assert_array_equal(shift(shift(V, s1), s2), shift(V, (s1 + s2) % N))
    np.testing.assert_array_equal(shift(shift(V, s1), (N - s1) % N), V)


# --- derivative --------------------------------------------------------------

def test_derivative_constant_is_zero():
    np.testing.assert_array_equal(derivative(Loop.constant([1.5, -2.0], 16).values), 0.0)


def test_derivative_of_circle():
    t = grid_times(64)
    v = np.c_[np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)]
    expected = 2 * np.pi * np.c_[-np.sin(2 * np.pi * t), np.cos(2 * np.pi * t)]
    assert np.max(np.abs(derivative(v) - expected)) <= 1e-12


@pytest.mark.parametrize("N", [16, 32, 64])
def test_nyquist_mode_maps_to_zero(N):
    t = grid_times(N)
    M = N // 2
    for wave in (np.sin, np.cos):
        v = np.c_[wave(2 * np.pi * M * t), np.zeros(N)]
        assert np.max(np.abs(derivative(v))) <= 1e-13 * N  # samples carry ~1e-14 rounding


@pytest.mark.parametrize("N", [5, 8, 33, 64])
def test_derivative_exact_below_nyquist(N):
    # oracle: analytic derivative of each Fourier mode of degree < N/2
    t = grid_times(N)
    for m in range(1, (N - 1) // 2 + 1):
        v = np.c_[np.cos(2 * np.pi * m * t), np.sin(2 * np.pi * m * t)]
        exp = 2 * np.pi * m * np.c_[-np.sin(2 * np.pi * m * t), np.cos(2 * np.pi * m * t)]
        assert np.max(np.abs(derivative(v) - exp)) <= 1e-12 * (1 + 2 * np.pi * m) * N


def test_derivative_matches_fft(rng):
    for N in (4, 7, 50, 128):
        V = rng.standard_normal((N, 3))
        k = np.fft.fftfreq(N, 1.0 / N)
        mult = 2j * np.pi * k
        if N % 2 == 0:
            mult[N // 2] = 0
        ref = np.fft.ifft(mult[:, None] * np.fft.fft(V, axis=0), axis=0).real
        np.testing.assert_allclose(derivative(V), ref, atol=1e-12 * N)


def test_derivative_grid_too_coarse():
    with pytest.raises(GridTooCoarseError):
        derivative(np.zeros((3, 2)))


@settings(max_examples=60, deadline=None)
@given(loops(), st.data())
def test_derivative_commutes_with_shift_exactly(V, data):
    s = data.draw(st.integers(0, V.shape[0] - 1))
    np.testing.assert_array_equal(derivative(shift(V, s)), shift(derivative(V), s))


@settings(max_examples=40, deadline=None)
@given(loops())
def test_derivative_has_zero_mean(V):
    assert np.all(np.abs(derivative(V).sum(axis=0)) <= 1e-9 * (1 + np.abs(V).max()) * V.shape[0] ** 2)


# --- quadrature / inner product ----------------------------------------------

@pytest.mark.parametrize("N", [1, 3, 16, 101])
def test_quadrature_of_ones(N):
    assert quadrature(np.ones(N)) == 1.0


def test_quadrature_trig():
    t = grid_times(16)
    assert abs(quadrature(np.cos(2 * np.pi * t))) <= 1e-15
    assert abs(quadrature(np.cos(2 * np.pi * t) ** 2) - 0.5) <= 1e-15


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 40), elements=finite), st.data())
def test_quadrature_shift_invariant_exactly(a, data):
    s = data.draw(st.integers(0, a.shape[0] - 1))
    assert quadrature(np.roll(a, s)) == quadrature(a)


def test_l2_inner_examples():
    N = 12
    e1 = np.tile([1.0, 0.0], (N, 1))
    e2 = np.tile([0.0, 1.0], (N, 1))
    assert l2_inner(np.zeros((N, 2)), np.zeros((N, 2))) == 0.0
    assert l2_inner(e1, e2) == 0.0
    assert l2_inner(e1, e1) == 1.0
    with pytest.raises(DimensionError):
        l2_inner(e1, np.zeros((N, 4)))


@settings(max_examples=40, deadline=None)
@given(loops(cols=4), st.data())
def test_l2_inner_symmetric_bilinear(A, data):
    B = data.draw(arrays(np.float64, A.shape, elements=finite))
    C = data.draw(arrays(np.float64, A.shape, elements=finite))
    assert l2_inner(A, B) == l2_inner(B, A)
    lhs = l2_inner(A + 2.0 * C, B)
    rhs = l2_inner(A, B) + 2.0 * l2_inner(C, B)
    assert math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-6 * (1 + np.abs(A).max() + np.abs(C).max()) * (1 + np.abs(B).max()))
    assert l2_inner(A, A) >= 0.0


def test_derivative_orthogonal_to_constants(smooth_loop):
    V = smooth_loop(n=2, N=64)
    c = np.tile(np.array([0.3, -1.0, 2.0, 0.5]), (64, 1))
    assert abs(l2_inner(derivative(V), c)) <= 1e-13


# --- loop_average ------------------------------------------------------------

def test_loop_average_examples():
    r = 0.7
    circle = Loop.circle(r, 32)
    assert loop_average(registry.make_field("const(2.5)", 1), circle) == 2.5
    H = registry.make_field(f"harmonic({math.pi!r})", 1)
    assert abs(loop_average(H, circle) - math.pi * r * r) <= 1e-12
    t = grid_times(32)
    v = Loop(np.c_[np.cos(2 * np.pi * t), np.zeros(32)])
    assert abs(loop_average(registry.make_field("linear(1)", 1), v)) <= 1e-15
    with pytest.raises(DimensionError):
        loop_average(registry.make_field("harmonic(1)", 2), circle)


def test_spectral_decay_of_band_limited_loop():
    decay = spectral_decay(Loop.circle(1.0, 32))
    assert decay[1] == pytest.approx(1.0)
    assert np.all(decay[2:] < 1e-14)
