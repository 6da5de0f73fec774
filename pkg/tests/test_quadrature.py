import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from casimir_kk.errors import ConvergenceError
from casimir_kk.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gk21, integrate, integrate_pieces


def test_rule_weights_sum_to_interval_length():
    assert math.isclose(KRONROD_WEIGHTS.sum(), 2.0, rel_tol=1e-15)
    assert math.isclose(GAUSS_WEIGHTS.sum(), 2.0, rel_tol=1e-15)
    assert np.all(np.diff(NODES) > 0)


@pytest.mark.parametrize("degree", range(0, 32))
def test_kronrod_exact_for_polynomials(degree):
    # K21 integrates polynomials up to degree 31 exactly
    val, _ = gk21(lambda x: x**degree, np.array(0.0), np.array(1.0))
    assert math.isclose(float(val), 1.0 / (degree + 1), rel_tol=1e-13)


@pytest.mark.parametrize("degree", range(0, 20))
def test_gauss_exact_for_polynomials(degree):
    x = 0.5 + 0.5 * NODES
    gauss = 0.5 * np.dot(x**degree, GAUSS_WEIGHTS)
    assert math.isclose(gauss, 1.0 / (degree + 1), rel_tol=1e-13)


def test_gk21_broadcasts_over_intervals():
    lo = np.array([0.0, 1.0, 2.0])
    hi = lo + 1.0
    val, err = gk21(np.cos, lo, hi)
    assert val.shape == (3,)
    np.testing.assert_allclose(val, np.sin(hi) - np.sin(lo), rtol=1e-14)
    assert np.all(err < 1e-12)


def test_gk21_rejects_nonfinite_integrand():
    with pytest.raises(ConvergenceError):
        gk21(lambda x: np.where(x > 0.5, np.inf, x), np.array(0.0), np.array(1.0))


@pytest.mark.parametrize("f, a, b", [
    (lambda x: np.exp(-x * x), -math.inf, math.inf),
    (lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf),
    (lambda x: np.exp(x), -math.inf, 0.0),
    (lambda x: np.log(x), 0.0, 1.0),
    (lambda x: 1.0 / np.sqrt(x), 0.0, 4.0),
    (lambda x: x * np.exp(-x) / (1.0 + x), 0.0, math.inf),
])
def test_matches_scipy_quad(f, a, b):
    expected, _ = sp_integrate.quad(lambda x: float(f(np.array(x))), a, b,
                                    epsabs=1e-13, epsrel=1e-13, limit=200)
    got = integrate(f, a, b, rel_tol=1e-12)
    assert math.isclose(got.value, expected, rel_tol=1e-10, abs_tol=1e-13)
    assert got.error <= 1e-12 * abs(got.value) + 1e-300


def test_lorentzian_peak_against_mpmath():
    # sharp peak far in the tail of an infinite interval
    def f(x):
        return 1.0 / ((x - 30.0) ** 2 + 1e-4)

    exact = float(mpmath.quad(lambda x: 1 / ((x - 30) ** 2 + mpmath.mpf("1e-4")),
                              [0, 30, mpmath.inf]))
    got = integrate(f, 0.0, math.inf, points=(30.0,), rel_tol=1e-11)
    assert math.isclose(got.value, exact, rel_tol=1e-9)


def test_oscillatory_decay_against_residue_formula():
    # sin^2 = (1 - cos 2x) / 2, and int cos(2x) / (1 + x^4) follows from residues
    r = math.sqrt(2.0)
    exact = math.pi / (2 * r) * (1.0 - math.exp(-r) * (math.cos(r) + math.sin(r)))
    got = integrate(lambda x: np.sin(x) ** 2 / (1.0 + x**4), -math.inf, math.inf, rel_tol=1e-12)
    assert math.isclose(got.value, exact, rel_tol=1e-10)


def test_reversed_limits_change_sign():
    fwd = integrate(np.exp, 0.0, 1.0).value
    rev = integrate(np.exp, 1.0, 0.0).value
    assert rev == -fwd


def test_pieces_share_one_budget():
    res = integrate_pieces([(np.cos, 0.0, 1.0), (np.cos, 1.0, 2.0, [1.5])], rel_tol=1e-12)
    assert math.isclose(res.value, math.sin(2.0), rel_tol=1e-12)
    assert res.intervals >= 3


def test_empty_pieces():
    assert integrate_pieces([(np.cos, 1.0, 1.0)]).value == 0.0


def test_breakpoints_on_infinite_piece_rejected():
    with pytest.raises(ValueError):
        integrate_pieces([(np.cos, 0.0, math.inf, [1.0])])


def test_budget_exhaustion_raises():
    with pytest.raises(ConvergenceError):
        integrate(lambda x: np.sin(1.0 / x) / x, 1e-6, 1.0, rel_tol=1e-14, max_evals=2000)


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 10), st.floats(0.01, 3))
def test_gaussian_integral_property(mu, width, scale):
    got = integrate(lambda x: scale * np.exp(-((x - mu) / width) ** 2), -math.inf, math.inf,
                    rel_tol=1e-11).value
    assert math.isclose(got, scale * width * math.sqrt(math.pi), rel_tol=1e-9)
