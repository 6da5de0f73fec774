import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_kk.errors import DomainError, ParseError, UnsupportedModelError, ValidationError
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
    load_material,
    oscillator_beta,
)
from strategies import closed_form_models

GOLD_OSCILLATORS = [(3.87, 59.61, 2.62), (8.37, 122.55, 6.41), (23.46, 1031.19, 27.57)]


def reference_gold(omega):
    """Term-by-term complex sum written independently of the package."""
    total = 1.0 - 81.0 / omega**2
    for w, f, g in GOLD_OSCILLATORS:
        total += f / complex(w * w - omega * omega, -g * omega)
    return total


def test_gold_parameters():
    gold = gold_default()
    assert gold.omega_p == 9.0
    assert len(gold.oscillators) == 3
    assert gold.oscillators[0] == Oscillator(3.87, 59.61, 2.62)
    assert [(o.resonance, o.strength, o.damping) for o in gold.oscillators] == GOLD_OSCILLATORS


def test_pure_plasma_vanishes_at_plasma_frequency():
    assert eval_complex(PurePlasma(9.0), 9.0) == 0j


def test_pure_plasma_transparent_at_high_frequency():
    assert abs(eval_complex(PurePlasma(9.0), 1e6) - 1.0) < 1e-9


@pytest.mark.parametrize("omega", [0.1, 1.0, 3.87, 5.0, 30.0, 100.0])
def test_gold_matches_term_by_term_sum(omega):
    got = eval_complex(gold_default(), omega)
    exact = reference_gold(omega)
    assert abs(got - exact) <= 1e-13 * abs(exact)


def test_gold_loss_on_first_resonance():
    # oscillator 1 on resonance gives f/(g w) = 5.879; the other two add tails
    on_resonance = 59.61 / (2.62 * 3.87)
    assert math.isclose(on_resonance, 5.879, abs_tol=5e-4)
    assert math.isclose(eps_imag(gold_default(), 3.87), 7.08, abs_tol=5e-3)
    assert eps_imag(gold_default(), 3.87) == pytest.approx(reference_gold(3.87).imag, rel=1e-14)


def test_gold_imaginary_axis_at_one_ev():
    terms = [1.0, 81.0] + [f / (w * w + 1.0 + g) for w, f, g in GOLD_OSCILLATORS]
    assert [round(t, 3) for t in terms[2:]] == [3.205, 1.582, 1.781]
    got = eval_imag_axis(gold_default(), 1.0)
    assert math.isclose(got, math.fsum(terms), rel_tol=1e-14)
    assert round(got, 2) == 88.57


def test_pure_plasma_imaginary_axis():
    assert eval_imag_axis(PurePlasma(9.0), 9.0) == 2.0
    assert abs(eval_imag_axis(gold_default(), 1e8) - 1.0) < 1e-12


def test_pure_plasma_is_lossless():
    w = np.geomspace(1e-3, 1e3, 101)
    assert np.all(eps_imag(PurePlasma(9.0), w) == 0.0)


def test_lossless_oscillators_have_no_loss_off_resonance():
    model = GeneralizedPlasma(9.0, (Oscillator(3.0, 10.0, 0.0), Oscillator(7.0, 50.0, 0.0)))
    w = np.array([0.5, 2.0, 5.0, 10.0, 40.0])
    assert np.all(eps_imag(model, w) == 0.0)


def test_pure_plasma_equals_generalized_without_oscillators():
    rng = np.random.default_rng(7)
    w = rng.uniform(1e-3, 1e3, 1000)
    a, b = PurePlasma(9.0), GeneralizedPlasma(9.0, ())
    assert np.array_equal(eval_complex(a, w), eval_complex(b, w))
    assert np.array_equal(eval_imag_axis(a, w), eval_imag_axis(b, w))


def test_drude_formula():
    model = Drude(9.0, 0.035)
    w = 0.5
    assert eval_complex(model, w) == pytest.approx(1 - 81.0 / (w * (w + 0.035j)), rel=1e-15)
    assert eval_imag_axis(model, w) == pytest.approx(1 + 81.0 / (w * (w + 0.035)), rel=1e-15)
    assert model.f0 == 81.0


def test_vectorised_shapes():
    w = np.linspace(1, 10, 6).reshape(2, 3)
    assert eval_complex(gold_default(), w).shape == (2, 3)
    assert eval_imag_axis(gold_default(), w).shape == (2, 3)
    assert isinstance(eval_imag_axis(gold_default(), 2.0), float)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_nonpositive_frequency_rejected(bad):
    with pytest.raises(DomainError):
        eval_complex(gold_default(), bad)
    with pytest.raises(DomainError):
        eval_imag_axis(gold_default(), bad)


def test_tabulated_not_closed_form():
    with pytest.raises(UnsupportedModelError):
        eval_complex(Tabulated(dataset=None), 1.0)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, -0.1),
                                  (math.nan, 1.0, 1.0)])
def test_oscillator_validation(args):
    with pytest.raises(ValidationError):
        Oscillator(*args)


def test_model_validation():
    with pytest.raises(ValidationError):
        GeneralizedPlasma(0.0)
    with pytest.raises(ValidationError):
        Drude(9.0, 0.0)
    with pytest.raises(ValidationError):
        Tabulated(dataset=None, include_plasma_pole=True)


def test_oscillator_beta_values():
    betas = [oscillator_beta(o) for o in gold_default().oscillators]
    expected = [1 - g * g / (2 * w * w) for w, _, g in GOLD_OSCILLATORS]
    assert betas == pytest.approx(expected, rel=1e-15)
    assert betas[0] == pytest.approx(0.770834, abs=1e-6)


def test_load_material(tmp_path):
    path = tmp_path / "au.toml"
    path.write_text('omega_p_eV = 9.0\noscillators = [[3.87, 59.61, 2.62]]\n')
    model = load_material(path)
    assert isinstance(model, GeneralizedPlasma)
    assert model.oscillators == (Oscillator(3.87, 59.61, 2.62),)
    assert isinstance(load_material(path, kind="plasma"), PurePlasma)
    with pytest.raises(ParseError):
        load_material(path, kind="drude")

    path.write_text('omega_p_eV = 9.0\ng0_eV = 0.035\n')
    model = load_material(path)
    assert isinstance(model, Drude) and model.damping == 0.035


def test_load_material_errors(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('oscillators = []\n')
    with pytest.raises(ParseError, match="omega_p_eV"):
        load_material(path)
    path.write_text('omega_p_eV = 9.0\noscillators = [[1.0, 2.0]]\n')
    with pytest.raises(ParseError, match="oscillators"):
        load_material(path)
    path.write_text('omega_p_eV = \n')
    with pytest.raises(ParseError):
        load_material(path)


@settings(max_examples=60, deadline=None)
@given(closed_form_models)
def test_passivity(model):
    w = np.geomspace(1e-3, 1e3, 200)
    assert np.all(eps_imag(model, w) >= 0.0)


@settings(max_examples=60, deadline=None)
@given(closed_form_models)
def test_imaginary_axis_decreasing_and_above_one(model):
    xi = np.geomspace(1e-3, 1e3, 200)
    e = eval_imag_axis(model, xi)
    assert np.all(e > 1.0)
    assert np.all(np.diff(e) < 0)


@settings(max_examples=40, deadline=None)
@given(closed_form_models, st.floats(0.01, 100.0))
def test_real_and_imaginary_parts_agree_with_complex(model, omega):
    e = eval_complex(model, omega)
    assert eps_real(model, omega) == e.real
    assert eps_imag(model, omega) == e.imag
