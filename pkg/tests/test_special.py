import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from floqsim.special import bessel_j0, bisect_root


def j0_integral(x):
    # (1/pi) int_0^pi cos(x sin tau) dtau
    val, _ = integrate.quad(lambda tau: np.cos(x * np.sin(tau)), 0.0, np.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val / np.pi


def test_j0_known_values():
    assert bessel_j0(0.0) == 1.0
    assert abs(bessel_j0(2.404826)) < 1e-6


def test_j0_against_integral_representation():
    rng = np.random.default_rng(3)
    for x in rng.uniform(-30, 30, size=20):
        assert abs(bessel_j0(x) - j0_integral(x)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(-49.9, 49.9))
def test_j0_matches_reference_and_is_even(x):
    assert abs(bessel_j0(x) - special.j0(x)) < 1e-12
    assert bessel_j0(x) == bessel_j0(-x)


def test_j0_array_input():
    xs = np.linspace(0, 20, 11)
    np.testing.assert_allclose(bessel_j0(xs), special.j0(xs), atol=1e-12)


def test_j0_range():
    with pytest.raises(ValueError):
        bessel_j0(50.0)
    with pytest.raises(ValueError):
        bessel_j0(float("nan"))


def test_bisect_root():
    assert bisect_root(lambda x: x * x - 2, 0, 2) == pytest.approx(np.sqrt(2), abs=1e-10)
    # bracket widening
    assert bisect_root(lambda x: x - 3.05, 0, 1, widen=1.0) == pytest.approx(3.05, abs=1e-10)
    with pytest.raises(ValueError):
        bisect_root(lambda x: x * x + 1, -1, 1, max_widen=3)
