import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from casimir_kk.errors import DomainError, UnsupportedModelError
from casimir_kk.kramers_kronig import (
    PVIntegrand,
    kk_imag_axis,
    kk_imag_from_real,
    kk_real_from_imag,
    kk_round_trip,
    pole_strength,
    pv_integral,
    verify_oscillator_identity,
)
from casimir_kk.models import (
    Drude,
    GeneralizedPlasma,
    Oscillator,
    PurePlasma,
    Tabulated,
    eps_imag,
    eps_real,
    eval_complex,
    eval_imag_axis,
    gold_default,
    oscillator_beta,
)

GOLD = gold_default()


def zero(x):
    return np.zeros_like(x)


def test_pv_simple_pole_on_whole_line():
    res = pv_integral(PVIntegrand(lambda x: 1.0 / (x - 2.0), singularity=2.0))
    assert abs(res.value) < 1e-9


def test_pv_odd_integrand_on_symmetric_window():
    res = pv_integral(PVIntegrand(lambda x: 1.0 / x, singularity=0.0, domain=(-1.0, 1.0)))
    assert res.value == 0.0


def test_pv_residue_oracle():
    # pi i Res(x=1) + 2 pi i Res(x=i) = -pi/2
    res = pv_integral(PVIntegrand(lambda x: 1.0 / ((x - 1.0) * (x * x + 1.0)), singularity=1.0))
    assert res.value == pytest.approx(-math.pi / 2, abs=1e-9)


def test_pv_against_scipy_cauchy_weight():
    # scipy's QAWC handles 1/(x - c) on a finite interval
    expected, _ = sp_integrate.quad(lambda x: math.exp(-x), 0.0, 5.0, weight="cauchy", wvar=1.3,
                                    epsabs=1e-13, epsrel=1e-13)
    got = pv_integral(PVIntegrand(lambda x: np.exp(-x) / (x - 1.3), 1.3, (0.0, 5.0)), tol=1e-12)
    assert got.value == pytest.approx(expected, rel=1e-10)


def test_pv_against_mpmath_on_half_line():
    # PV int_0^inf exp(-x)/(x - c) dx = -exp(-c) Ei(c)
    c = 0.7
    expected = float(-mpmath.exp(-c) * mpmath.ei(c))
    got = pv_integral(PVIntegrand(lambda x: np.exp(-x) / (x - c), c, (0.0, math.inf)), tol=1e-12)
    assert got.value == pytest.approx(expected, rel=1e-10)


def test_pv_without_singularity_is_plain_integral():
    res = pv_integral(PVIntegrand(lambda x: np.exp(-x * x)))
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_pv_singularity_outside_domain():
    with pytest.raises(DomainError):
        pv_integral(PVIntegrand(lambda x: 1.0 / x, singularity=2.0, domain=(-1.0, 1.0)))
    with pytest.raises(DomainError):
        pv_integral(PVIntegrand(lambda x: 1.0 / x, singularity=1.0, domain=(-1.0, 1.0)))


def test_degenerate_plasma_real_part():
    assert kk_real_from_imag(zero, 9.0, 9.0) == 0.0
    assert kk_real_from_imag(zero, 9.0, 3.0) == -8.0


def test_degenerate_plasma_imaginary_part():
    plasma = PurePlasma(9.0)
    assert kk_imag_from_real(lambda x: eps_real(plasma, x), 9.0, 2.5) == 0.0


def test_degenerate_plasma_imaginary_axis():
    assert kk_imag_axis(zero, 9.0, 9.0) == 2.0


def test_gold_real_part_at_five_ev():
    got = kk_real_from_imag(lambda x: eps_imag(GOLD, x), 9.0, 5.0)
    assert got == pytest.approx(eval_complex(GOLD, 5.0).real, rel=1e-3)
    assert got == pytest.approx(eval_complex(GOLD, 5.0).real, rel=1e-10)


@pytest.mark.parametrize("omega", [3.87, 30.0])
def test_gold_imaginary_part_from_real(omega):
    got = kk_imag_from_real(lambda x: eps_real(GOLD, x), 9.0, omega)
    exact = eps_imag(GOLD, omega)
    assert exact > 0
    assert got == pytest.approx(exact, rel=1e-3)
    if omega == 3.87:
        assert round(got, 2) == 7.08


@pytest.mark.parametrize("xi", [1.0, 100.0])
def test_gold_imaginary_axis(xi):
    got = kk_imag_axis(lambda x: eps_imag(GOLD, x), 9.0, xi)
    assert got == pytest.approx(eval_imag_axis(GOLD, xi), rel=1e-3)
    if xi == 1.0:
        assert round(got, 2) == 88.57
    else:
        assert got - 1.0 - 81e-4 > 0


def test_mismatched_plasma_energy_detected():
    with pytest.raises(DomainError, match="diverges"):
        kk_imag_from_real(lambda x: eps_real(GOLD, x), 8.0, 2.0)
    assert abs(pole_strength(lambda x: eps_real(GOLD, x), 9.0)) < 1e-6


def test_drude_uses_standard_relations_plus_conduction_term():
    model = Drude(9.0, 0.035, GOLD.oscillators)
    got = kk_imag_from_real(lambda x: eps_real(model, x), 0.0, 1.0, dc_term=81.0 / 0.035)
    assert got == pytest.approx(eps_imag(model, 1.0), rel=1e-8)
    got = kk_imag_axis(lambda x: eps_imag(model, x), 0.0, 0.5)
    assert got == pytest.approx(eval_imag_axis(model, 0.5), rel=1e-8)


def test_round_trip_gold():
    worst = kk_round_trip(GOLD)
    assert set(worst) == {"real_from_imag", "imag_from_real", "imag_axis"}
    assert max(worst.values()) < 1e-8


def test_round_trip_plasma_is_exact():
    worst = kk_round_trip(PurePlasma(9.0))
    assert worst["real_from_imag"] == 0.0
    assert worst["imag_from_real"] == 0.0
    assert worst["imag_axis"] < 1e-15


def test_round_trip_rejects_tabulated():
    with pytest.raises(UnsupportedModelError):
        kk_round_trip(Tabulated(dataset=None))


def test_identity_at_zero():
    i0, i2, closed = verify_oscillator_identity(0.0)
    assert closed == pytest.approx(2.221441, abs=1e-6)
    assert abs(i0 - closed) < 1e-12 and abs(i2 - closed) < 1e-12


def test_identity_closed_form_at_point_nine():
    assert verify_oscillator_identity(0.9)[2] == pytest.approx(7.024815, abs=1e-6)


@pytest.mark.parametrize("beta", [oscillator_beta(o) for o in GOLD.oscillators])
def test_identity_gold_betas(beta):
    i0, i2, closed = verify_oscillator_identity(beta)
    assert abs(i0 - closed) < 1e-8 and abs(i2 - closed) < 1e-8


def test_identity_against_mpmath():
    beta = mpmath.mpf("0.95")
    quartic = lambda y: y**4 - 2 * beta * y**2 + 1  # noqa: E731
    i0 = mpmath.quad(lambda y: 1 / quartic(y), [-mpmath.inf, -mpmath.sqrt(beta), 0,
                                                mpmath.sqrt(beta), mpmath.inf])
    got = verify_oscillator_identity(0.95)
    assert got[0] == pytest.approx(float(i0), rel=1e-12)


@pytest.mark.parametrize("beta", [1.0, 1.5, math.nan])
def test_identity_domain(beta):
    with pytest.raises(DomainError):
        verify_oscillator_identity(beta)


@settings(max_examples=40, deadline=None)
@given(st.floats(-50.0, 0.999))
def test_identity_property(beta):
    i0, i2, closed = verify_oscillator_identity(beta)
    assert abs(i0 - closed) < 1e-8 * max(1.0, closed)
    assert abs(i2 - closed) < 1e-8 * max(1.0, closed)


@settings(max_examples=15, deadline=None)
@given(st.floats(1.0, 15.0), st.floats(0.5, 30.0), st.floats(1.0, 500.0), st.floats(0.2, 10.0),
       st.floats(0.2, 50.0))
def test_single_oscillator_round_trip(omega_p, resonance, strength, damping, omega):
    model = GeneralizedPlasma(omega_p, (Oscillator(resonance, strength, damping),))
    got = kk_real_from_imag(lambda x: eps_imag(model, x), omega_p, omega)
    exact = eval_complex(model, omega).real
    assert abs(got - exact) <= 1e-6 * max(1.0, abs(exact))
    got = kk_imag_axis(lambda x: eps_imag(model, x), omega_p, omega)
    assert got == pytest.approx(eval_imag_axis(model, omega), rel=1e-8)
