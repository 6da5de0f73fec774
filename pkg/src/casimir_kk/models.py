"""Closed-form dielectric permittivity models.

Three closed-form families are provided, all built from the same pieces:

* ``GeneralizedPlasma``: ``1 + A(w) - wp**2 / w**2`` where ``A`` is a sum of
  Lorentz oscillators describing interband transitions of core electrons.
* ``PurePlasma``: the same with no oscillators (lossless free electrons).
* ``Drude``: the free-electron term replaced by ``-wp**2 / (w (w + i g0))``,
  i.e. an extra oscillator at zero resonance frequency.

``Tabulated`` is a record pointing at measured optical data; it is evaluated
by :mod:`casimir_kk.optical`, not here.

All frequencies are photon energies in eV.  Functions accept scalars or numpy
arrays and return the same shape.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DomainError, ParseError, UnsupportedModelError, ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "Oscillator",
    "PermittivityModel",
    "GeneralizedPlasma",
    "PurePlasma",
    "Drude",
    "Tabulated",
    "gold_default",
    "eval_complex",
    "eps_real",
    "eps_imag",
    "eval_imag_axis",
    "oscillator_beta",
    "load_material",
]


@dataclass(frozen=True)
class Oscillator:
    """One interband resonance.

    Attributes:
        resonance: resonance energy in eV, strictly positive.
        strength: oscillator strength in eV**2.
        damping: relaxation energy in eV.
    """

    resonance: float
    strength: float
    damping: float

    def __post_init__(self):
        for name in ("resonance", "strength", "damping"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"oscillator {name} must be finite, got {value!r}")
        if self.resonance <= 0:
            # a zero-frequency oscillator is the Drude term, not an interband one
            raise ValidationError(f"oscillator resonance must be > 0, got {self.resonance!r}")
        if self.strength < 0:
            raise ValidationError(f"oscillator strength must be >= 0, got {self.strength!r}")
        if self.damping < 0:
            raise ValidationError(f"oscillator damping must be >= 0, got {self.damping!r}")


def _check_omega_p(omega_p):
    if not (math.isfinite(omega_p) and omega_p > 0):
        raise ValidationError(f"plasma energy must be finite and > 0, got {omega_p!r}")


class PermittivityModel:
    """Marker base class for the permittivity variants."""

    label: str = "model"


@dataclass(frozen=True)
class GeneralizedPlasma(PermittivityModel):
    omega_p: float
    oscillators: tuple[Oscillator, ...] = ()
    label: str = "generalized plasma"

    def __post_init__(self):
        _check_omega_p(self.omega_p)
        object.__setattr__(self, "oscillators", tuple(self.oscillators))


@dataclass(frozen=True)
class PurePlasma(GeneralizedPlasma):
    """Lossless free-electron gas, ``eps = 1 - wp**2 / w**2``.

    Implemented as a :class:`GeneralizedPlasma` without oscillators so both
    share one evaluation path.
    """

    oscillators: tuple[Oscillator, ...] = field(default=(), init=False)
    label: str = "plasma"


@dataclass(frozen=True)
class Drude(PermittivityModel):
    """Free electrons with relaxation ``damping`` plus optional oscillators."""

    omega_p: float
    damping: float
    oscillators: tuple[Oscillator, ...] = ()
    label: str = "drude"

    def __post_init__(self):
        _check_omega_p(self.omega_p)
        if not (math.isfinite(self.damping) and self.damping > 0):
            raise ValidationError(f"Drude relaxation must be > 0, got {self.damping!r}")
        object.__setattr__(self, "oscillators", tuple(self.oscillators))

    @property
    def f0(self) -> float:
        return self.omega_p**2


@dataclass(frozen=True)
class Tabulated(PermittivityModel):
    """Permittivity backed by tabulated ``(omega, n, k)`` data.

    ``dataset`` is an :class:`casimir_kk.optical.OpticalDataset` and ``policy``
    an :class:`casimir_kk.optical.ExtrapolationPolicy` (or None).
    """

    dataset: Any
    policy: Any = None
    include_plasma_pole: bool = False
    omega_p: float | None = None
    label: str = "tabulated"

    def __post_init__(self):
        if self.include_plasma_pole:
            if self.omega_p is None:
                raise ValidationError("include_plasma_pole requires omega_p")
            _check_omega_p(self.omega_p)


def gold_default() -> GeneralizedPlasma:
    """Generalized plasma model of Au: wp = 9.0 eV and three interband oscillators."""
    return GeneralizedPlasma(
        omega_p=9.0,
        oscillators=(
            Oscillator(3.87, 59.61, 2.62),
            Oscillator(8.37, 122.55, 6.41),
            Oscillator(23.46, 1031.19, 27.57),
        ),
        label="gold generalized plasma",
    )


def _positive(x, name):
    arr = np.asarray(x, dtype=float)
    if arr.size and not np.all(arr > 0):
        raise DomainError(f"{name} must be > 0 (the permittivity has a pole at zero frequency)")
    return arr


def _closed_form(model):
    if isinstance(model, Tabulated):
        raise UnsupportedModelError(
            "tabulated models are evaluated through casimir_kk.optical")
    if not isinstance(model, (GeneralizedPlasma, Drude)):
        raise UnsupportedModelError(f"not a permittivity model: {model!r}")
    return model


def _oscillator_sum(oscillators, omega):
    total = np.zeros_like(omega, dtype=complex)
    for osc in oscillators:
        total = total + osc.strength / (osc.resonance**2 - omega**2 - 1j * osc.damping * omega)
    return total


def eval_complex(model, omega):
    """Complex permittivity on the real frequency axis, ``omega`` > 0."""
    model = _closed_form(model)
    w = _positive(omega, "omega")
    a = _oscillator_sum(model.oscillators, w)
    if isinstance(model, Drude):
        out = 1.0 + a - model.f0 / (w * (w + 1j * model.damping))
    else:
        out = 1.0 + a - model.omega_p**2 / w**2
    return out if out.ndim else complex(out)


def eps_real(model, omega):
    return np.real(eval_complex(model, omega))


def eps_imag(model, omega):
    """Dissipative part of the permittivity.  Identically zero for the plasma model."""
    return np.imag(eval_complex(model, omega))


def eval_imag_axis(model, xi):
    """Permittivity at imaginary frequency ``i xi``; real and > 1 for ``xi`` > 0."""
    model = _closed_form(model)
    x = _positive(xi, "xi")
    out = np.ones_like(x)
    for osc in model.oscillators:
        out = out + osc.strength / (osc.resonance**2 + x**2 + osc.damping * x)
    if isinstance(model, Drude):
        out = out + model.f0 / (x * (x + model.damping))
    else:
        out = out + model.omega_p**2 / x**2
    return out if out.ndim else float(out)


def oscillator_beta(osc: Oscillator) -> float:
    """``1 - g**2 / (2 w**2)``, the parameter of the quartic in the oscillator identity."""
    return 1.0 - osc.damping**2 / (2.0 * osc.resonance**2)


def load_material(path, kind=None) -> PermittivityModel:
    """Read a TOML material file.

    Recognised keys: ``omega_p_eV`` (required), ``oscillators`` (list of
    ``[resonance_eV, strength_eV2, damping_eV]``), ``g0_eV`` (Drude relaxation)
    and ``label``.  ``kind`` forces ``"generalized"``, ``"plasma"`` or
    ``"drude"``; by default the presence of ``g0_eV`` selects Drude.
    """
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read material file: {exc.strerror}", path) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc), path) from exc
    return material_from_mapping(doc, kind=kind, source=path)


def material_from_mapping(doc, kind=None, source=None) -> PermittivityModel:
    if "omega_p_eV" not in doc:
        raise ParseError("missing required key 'omega_p_eV'", source)
    try:
        omega_p = float(doc["omega_p_eV"])
        rows = doc.get("oscillators", [])
        oscillators = []
        for i, row in enumerate(rows):
            if len(row) != 3:
                raise ParseError(
                    f"oscillators[{i}] must be [resonance_eV, strength_eV2, damping_eV]", source)
            oscillators.append(Oscillator(*(float(v) for v in row)))
        g0 = doc.get("g0_eV")
        g0 = None if g0 is None else float(g0)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), source) from exc
    label = str(doc.get("label", Path(source).stem if source else "material"))

    if kind is None:
        kind = "drude" if g0 is not None else "generalized"
    if kind == "generalized":
        return GeneralizedPlasma(omega_p, tuple(oscillators), label=label)
    if kind == "plasma":
        return PurePlasma(omega_p, label=f"{label} (plasma)")
    if kind == "drude":
        if g0 is None:
            raise ParseError("Drude model requires key 'g0_eV'", source)
        return Drude(omega_p, g0, tuple(oscillators), label=f"{label} (drude)")
    raise ValueError(f"unknown model kind {kind!r}")
