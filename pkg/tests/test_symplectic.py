import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hamdelay import registry
from hamdelay import symplectic as sp
from hamdelay.errors import DimensionError, ModelSpecError

PI = repr(math.pi)

BUILTIN_IDS = [
    "harmonic(1.3)",
    "quartic(0.4)",
    "linear(0.5)",
    "exp_p(1)",
    "exp_halfAq(1; [[0, 2], [-2, 0]])",
    "scale(-1; exp_p(2))",
    "sum(harmonic(1), linear(1, -2))",
    "prod(exp_p(1), harmonic(0.5))",
]

points = arrays(np.float64, 4, elements=st.floats(-1.5, 1.5, allow_nan=False))


def test_complex_structure_examples():
    np.testing.assert_array_equal(sp.complex_structure([1.0, 0.0]), [0.0, 1.0])
    np.testing.assert_array_equal(sp.complex_structure([0.0, 1.0]), [-1.0, 0.0])
    np.testing.assert_array_equal(sp.complex_structure([1.0, 2.0, 3.0, 4.0]), [-3.0, -4.0, 1.0, 2.0])
    with pytest.raises(DimensionError):
        sp.complex_structure([1.0, 2.0, 3.0])


@settings(max_examples=100)
@given(arrays(np.float64, st.sampled_from([2, 4, 6]), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_j_squared_is_minus_identity_and_isometric(x):
    np.testing.assert_array_equal(sp.complex_structure(sp.complex_structure(x)), -x)
    np.testing.assert_array_equal(sp.complex_structure_inverse(sp.complex_structure(x)), x)
    assert math.fsum(sp.complex_structure(x) ** 2) == math.fsum(x**2)


def test_ham_vector_field_examples():
    x = np.array([0.3, -0.8])
    assert np.all(sp.ham_vector_field(registry.make_field("const(4)", 1), x) == 0.0)
    H = registry.make_field(f"harmonic({PI})", 1)
    np.testing.assert_allclose(sp.ham_vector_field(H, x), 2 * math.pi * np.array([0.8, 0.3]), atol=1e-15)
    P = registry.make_field("exp_p(1)", 1)  # used as a generic smooth field
    lin_p = sp.HamiltonianField(2, lambda x: x[..., 1], lambda x: np.broadcast_to([0.0, 1.0], np.shape(x)))
    np.testing.assert_array_equal(sp.ham_vector_field(lin_p, x), [-1.0, 0.0])
    with pytest.raises(DimensionError):
        sp.ham_vector_field(P, np.zeros(4))


@pytest.mark.parametrize("model_id", BUILTIN_IDS)
@settings(max_examples=20, deadline=None)
@given(x=points, xi=points)
def test_omega_compatibility_and_energy_invariance(model_id, x, xi):
    H = registry.make_field(model_id, 2)
    X = sp.ham_vector_field(H, x)
    g = H.gradient(x)
    scale = 1 + np.abs(g).max() * (1 + np.abs(xi).max())
    assert abs(sp.omega(X, xi) + g @ xi) <= 1e-12 * scale
    assert abs(g @ X) <= 1e-12 * (1 + np.abs(g).max() ** 2)


@pytest.mark.parametrize("model_id", BUILTIN_IDS)
def test_builtin_gradients_match_finite_differences(model_id, rng):
    H = registry.make_field(model_id, 2)
    for _ in range(10):
        assert sp.gradient_check(H, rng.uniform(-1, 1, 4), 1e-5) <= 1e-6


def test_gradient_check_examples():
    quad = registry.make_field("harmonic(1)", 1)
    assert sp.gradient_check(quad, np.array([1.0, 2.0]), 1e-5) <= 1e-8
    lin = registry.make_field("linear(1)", 1)
    assert sp.gradient_check(lin, np.array([-7.0, 0.2]), 1e-5) <= 1e-12
    # generic affine data: exact up to the rounding of H itself, |H| u / eps
    assert sp.gradient_check(registry.make_field("linear(3.5)", 1), np.array([-7.0, 0.2]), 1e-5) <= 1e-9
    assert sp.gradient_check(registry.make_field("exp_p(1)", 1), np.zeros(2), 1e-5) <= 1e-9


def test_gradient_check_catches_wrong_gradient():
    bad = sp.HamiltonianField(2, lambda x: np.sum(x**2, axis=-1), lambda x: np.asarray(x, float))
    assert sp.gradient_check(bad, np.array([1.0, 1.0])) > 0.1


def test_partial_vector_fields_examples(rng):
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    H1 = registry.make_field("exp_p(1)", 1)
    H2 = registry.make_field("harmonic(2)", 1)
    X1, X2 = sp.partial_vector_fields(registry.make_two_input("separable(exp_p(1), zero)", 1), x, y)
    np.testing.assert_allclose(X1, sp.ham_vector_field(H1, x))
    np.testing.assert_array_equal(X2, 0.0)
    X1, X2 = sp.partial_vector_fields(registry.make_two_input("pair_coupling", 1), x, y)
    np.testing.assert_array_equal(X1, sp.complex_structure(y))
    np.testing.assert_array_equal(X2, sp.complex_structure(x))
    X1, X2 = sp.partial_vector_fields(registry.make_two_input("separable(exp_p(1), harmonic(2))", 1), x, y)
    np.testing.assert_allclose(X1, sp.ham_vector_field(H1, x))
    np.testing.assert_allclose(X2, sp.ham_vector_field(H2, y))


@pytest.mark.parametrize("model_id", ["pair_coupling", "separable(harmonic(1), exp_p(2))", "cross(exp_p(1), quartic(0.3))"])
def test_two_input_gradients_match_finite_differences(model_id, rng):
    H = registry.make_two_input(model_id, 2)
    for _ in range(5):
        assert sp.two_input_gradient_check(H, rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)) <= 1e-6


def test_time_families_are_periodic(rng):
    fam = registry.make_family("modulated(harmonic(1); 0.3, 0.7)", 1)
    x = rng.standard_normal((5, 2))
    t = rng.random(5)
    tau = rng.random(5)
    base = fam.value(x, t, tau)
    np.testing.assert_allclose(fam.value(x, t + 1, tau), base, atol=1e-12)
    np.testing.assert_allclose(fam.value(x, t, tau + 1), base, atol=1e-12)
    np.testing.assert_allclose(fam.gradient_x(x, t + 1, tau + 1), fam.gradient_x(x, t, tau), atol=1e-12)


def test_time_family_gradient_matches_fd(rng):
    fam = registry.make_family("modulated(exp_p(1); 0.2, 0.4)", 1)
    x = rng.standard_normal(2)
    g = fam.gradient_x(x, 0.3, 0.7)
    for j in range(2):
        e = np.zeros(2)
        e[j] = 1e-6
        fd = (fam.value(x + e, 0.3, 0.7) - fam.value(x - e, 0.3, 0.7)) / 2e-6
        assert abs(fd - g[j]) <= 1e-7


def test_product_field_gradient():
    H = sp.field_product(registry.make_field("exp_p(1)", 1), registry.make_field("quartic(1)", 1))
    assert sp.gradient_check(H, np.array([0.4, -0.3])) <= 1e-7


# --- registry ----------------------------------------------------------------

def test_parse_model_id_nesting():
    assert registry.parse_model_id("harmonic") == ("harmonic", [])
    assert registry.parse_model_id("exp_halfAq(2; [[0,1],[-1,0]])") == ("exp_halfAq", ["2", "[[0,1],[-1,0]]"])
    assert registry.parse_model_id("separable(harmonic(1), exp_p(1))") == ("separable", ["harmonic(1)", "exp_p(1)"])


@pytest.mark.parametrize("bad", ["", "harmonic(", "nope(1)", "exp_p(0)", "exp_halfAq(1; [[0]])", "linear(1,2,3)", "harmonic(x)"])
def test_registry_rejects_bad_ids(bad):
    with pytest.raises(ModelSpecError):
        registry.make_field(bad, 2)


def test_registry_values():
    x = np.array([0.5, -1.0, 2.0, 0.25])  # q = (0.5, -1), p = (2, 0.25)
    assert registry.make_field("harmonic(2)", 2).value(x) == pytest.approx(2 * np.sum(x**2))
    assert registry.make_field("linear(1, 3)", 2).value(x) == pytest.approx(0.5 - 3.0)
    assert registry.make_field("exp_p(2)", 2).value(x) == pytest.approx(math.exp(0.25))
    A = "[[0, 4], [-4, 0]]"
    assert registry.make_field(f"exp_halfAq(1; {A})", 2).value(x) == pytest.approx(math.exp(0.5 * 4 * -1.0))
    assert registry.make_two_input("pair_coupling", 2).value(x, x) == pytest.approx(np.sum(x**2))
    assert registry.is_known("pair_coupling") and not registry.is_known("bogus")
