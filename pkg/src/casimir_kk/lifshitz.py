"""Lifshitz free energy of two plates and the PFA sphere-plate force.

With ``y = 2 a q`` and ``y_l = 2 a xi_l / hbar c`` the free energy per unit
area of two identical half-spaces at separation ``a`` is::

    F(a, T) = k_B T / (8 pi a**2) * sum'_l int_{y_l}^inf y dy
              sum_{TM,TE} ln(1 - r**2 exp(-y))

(the prime halves the ``l = 0`` term).  At zero temperature the Matsubara
sum becomes an integral over ``y_l`` with prefactor ``hbar c / (32 pi**2 a**3)``.
The sphere-plate force is ``2 pi R |F|``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from functools import lru_cache
from typing import Callable

import numpy as np

from . import models
from .constants import HBAR_C, K_B, PN_PER_EV_NM
from .errors import ConvergenceError, DomainError, UnsupportedModelError, ValidationError
from .quadrature import gk21, integrate, integrate_pieces

__all__ = [
    "ZeroMode",
    "Response",
    "IDEAL_METAL",
    "VACUUM",
    "as_response",
    "LifshitzConfig",
    "ForceTable",
    "matsubara_frequency",
    "reflection_coeffs",
    "free_energy_plates",
    "energy_plates_zero_T",
    "force_sphere_plate",
    "force_table",
    "round_sig",
]

Y_SPAN = 50.0            # integrand is suppressed by exp(-y) beyond y_l + Y_SPAN
Y_SEEDS = np.array([1.0, 4.0, 12.0])  # initial subdivision offsets from y_l
MATSUBARA_CUTOFF = 1e-10  # stop once a term is this small relative to the sum
BLOCK = 64                # Matsubara terms evaluated per vectorised pass
DEFAULT_REL_TOL = 1e-6


@dataclass(frozen=True)
class ZeroMode:
    """Analytic ``xi -> 0`` limit of the reflection coefficients.

    ``kind`` is ``"plasma"`` (needs ``omega_p``), ``"drude"``, ``"ideal"`` or
    ``"dielectric"`` (needs ``eps_static``).
    """

    kind: str
    omega_p: float | None = None
    eps_static: float | None = None

    def __post_init__(self):
        if self.kind not in ("plasma", "drude", "ideal", "dielectric"):
            raise ValueError(f"unknown zero-frequency kind {self.kind!r}")
        if self.kind == "plasma" and not (self.omega_p and self.omega_p > 0):
            raise ValueError("plasma zero mode needs omega_p > 0")
        if self.kind == "dielectric" and not (self.eps_static and self.eps_static > 0):
            raise ValueError("dielectric zero mode needs eps_static > 0")


@dataclass(frozen=True, eq=False)
class Response:
    """What the Lifshitz formula needs from a material.

    ``eps`` maps imaginary frequencies (eV, numpy array) to ``eps(i xi)``;
    ``zero_mode`` fixes the ``l = 0`` reflection coefficients.
    """

    eps: Callable[[np.ndarray], np.ndarray]
    zero_mode: ZeroMode
    label: str = "material"


IDEAL_METAL = Response(lambda xi: np.full(np.shape(xi), np.inf), ZeroMode("ideal"), "ideal metal")
VACUUM = Response(lambda xi: np.ones(np.shape(xi)), ZeroMode("dielectric", eps_static=1.0),
                  "vacuum")


def _tabulated_response(model: models.Tabulated) -> Response:
    from .optical import TabulatedLoss

    loss = TabulatedLoss.build(model.dataset, model.policy)
    pole = model.include_plasma_pole

    @lru_cache(maxsize=4096)
    def at(xi):
        return loss.imag_axis(xi, pole, model.omega_p)

    def eps(xi):
        xi = np.asarray(xi, dtype=float)
        return np.reshape([at(float(x)) for x in xi.ravel()], xi.shape)

    if pole:
        mode = ZeroMode("plasma", omega_p=model.omega_p)
    elif loss.policy.low is not None:
        mode = ZeroMode("drude")
    else:
        # finite static permittivity: the loss integral at xi = 0
        mode = ZeroMode("dielectric", eps_static=1.0 + 2.0 * loss.loss_integral(0.0) / math.pi)
    return Response(eps, mode, model.label)


def as_response(material) -> Response:
    """Coerce a permittivity model (or a ready :class:`Response`) to a Response."""
    if isinstance(material, Response):
        return material
    if isinstance(material, models.Tabulated):
        return _tabulated_response(material)
    if isinstance(material, models.Drude):
        mode = ZeroMode("drude")
    elif isinstance(material, models.GeneralizedPlasma):
        mode = ZeroMode("plasma", omega_p=material.omega_p)
    else:
        raise UnsupportedModelError(f"cannot build a Lifshitz response from {material!r}")
    return Response(lambda xi, m=material: models.eval_imag_axis(m, xi), mode, material.label)


def matsubara_frequency(T, l):
    """``2 pi k_B T l`` in eV."""
    if not T > 0:
        raise DomainError(f"temperature must be > 0 K, got {T!r}; use the zero-temperature path")
    if l < 0 or int(l) != l:
        raise DomainError(f"Matsubara index must be a non-negative integer, got {l!r}")
    return 2.0 * math.pi * K_B * T * l


def _fresnel(eps, q, xi):
    # q and xi share any common scale (eV, or the dimensionless y variables)
    k = np.sqrt(q * q + (eps - 1.0) * xi * xi)
    return (eps * q - k) / (eps * q + k), (q - k) / (q + k)


def _zero_coeffs(mode, k_perp):
    k_perp = np.asarray(k_perp, dtype=float)
    one = np.ones_like(k_perp)
    if mode.kind == "plasma":
        root = np.sqrt(k_perp * k_perp + mode.omega_p**2)
        return one, mode.omega_p**2 / (root + k_perp) ** 2
    if mode.kind == "drude":
        return one, np.zeros_like(k_perp)
    if mode.kind == "ideal":
        return one, -one
    e0 = mode.eps_static
    return one * ((e0 - 1.0) / (e0 + 1.0)), np.zeros_like(k_perp)


def reflection_coeffs(eps, xi, k_perp, zero_mode: ZeroMode | None = None):
    """Fresnel coefficients ``(r_TM, r_TE)`` at imaginary frequency ``i xi``.

    ``xi`` and ``k_perp`` are energies (``k_perp`` is ``hbar c`` times the
    wave number).  ``eps = inf`` flags the ideal metal.  At ``xi = 0`` the
    analytic limit in ``zero_mode`` is used instead of ``eps``.
    """
    kp = np.asarray(k_perp, dtype=float)
    if xi < 0 or (kp.size and np.any(kp < 0)):
        raise DomainError("xi and k_perp must be non-negative")
    if xi == 0:
        if kp.size and np.any(kp == 0):
            raise DomainError("xi and k_perp cannot both vanish")
        if zero_mode is None:
            if eps == math.inf:
                zero_mode = ZeroMode("ideal")
            else:
                raise DomainError("the xi = 0 coefficients need a zero-frequency limit")
        r_tm, r_te = _zero_coeffs(zero_mode, kp)
    elif eps == math.inf:
        r_tm, r_te = np.ones_like(kp), -np.ones_like(kp)
    else:
        if not eps > 0:
            raise DomainError(f"eps(i xi) must be > 0, got {float(np.min(eps))!r}")
        # normalising by q keeps tiny frequencies from underflowing to 0/0
        q = np.hypot(kp, xi)
        r_tm, r_te = _fresnel(eps, np.ones_like(q), xi / q)
    if r_tm.ndim == 0:
        return float(r_tm), float(r_te)
    return r_tm, r_te


def _log_terms(r_tm, r_te, y):
    decay = np.exp(-y)
    return y * (np.log1p(-r_tm * r_tm * decay) + np.log1p(-r_te * r_te * decay))


def _y_integral(resp, a, xi, y_l, rel_tol):
    """``int_{y_l}^{y_l + Y_SPAN} y sum_alpha ln(1 - r**2 e^-y) dy`` at one frequency."""
    if y_l == 0.0:
        scale = HBAR_C / (2.0 * a)

        def f(y):
            r_tm, r_te = _zero_coeffs(resp.zero_mode, y * scale)
            return _log_terms(r_tm, r_te, y)
    else:
        eps = float(resp.eps(np.array([xi]))[0])
        if eps == math.inf:
            def f(y):
                return _log_terms(1.0, -1.0, y)
        else:
            if not eps > 0:
                raise DomainError(f"eps(i xi) must be > 0 at xi={xi!r}, got {float(np.min(eps))!r}")

            def f(y):
                r_tm, r_te = _fresnel(eps, y, y_l)
                return _log_terms(r_tm, r_te, y)

    res = integrate_pieces([(f, y_l, y_l + Y_SPAN, y_l + Y_SEEDS)], rel_tol=rel_tol)
    return res.value, res.error


def _check_positive(value, name):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def _term_block(resp, a, xi, y_l, rel_tol):
    """Vectorised ``_y_integral`` for a block of non-zero Matsubara frequencies.

    Every term gets the seeded panels in one pass; terms whose error estimate
    misses ``rel_tol`` are redone adaptively.
    """
    eps = np.asarray(resp.eps(xi), dtype=float)
    if np.any(~(eps > 0)):
        i = int(np.flatnonzero(~(eps > 0))[0])
        raise DomainError(f"eps(i xi) must be > 0 at xi={float(xi[i])!r}, got {float(eps[i])!r}")
    edges = y_l[:, None] + np.concatenate([[0.0], Y_SEEDS, [Y_SPAN]])
    e3 = eps[:, None, None]
    yl3 = y_l[:, None, None]
    ideal = np.isinf(e3)
    safe = np.where(ideal, 2.0, e3)

    def f(y):
        r_tm, r_te = _fresnel(safe, y, yl3)
        r_tm = np.where(ideal, 1.0, r_tm)
        r_te = np.where(ideal, -1.0, r_te)
        return _log_terms(r_tm, r_te, y)

    val, err = gk21(f, edges[:, :-1], edges[:, 1:])
    values, errors = val.sum(axis=1), err.sum(axis=1)
    for i in np.flatnonzero(errors > rel_tol * np.abs(values)):
        values[i], errors[i] = _y_integral(resp, a, xi[i], y_l[i], rel_tol)
    return values, errors


def free_energy_plates(material, a, T, rel_tol=DEFAULT_REL_TOL, full_output=False,
                       max_terms=1_000_000):
    """Free energy per unit area (eV/nm**2) of two plates at separation ``a`` nm.

    Terms are summed in ascending ``l`` until one drops below
    ``MATSUBARA_CUTOFF`` relative to the running sum or ``y_l`` exceeds
    ``Y_SPAN``.  With ``full_output`` also returns a dict with the number of
    Matsubara terms, the stopping rule hit, the y-integration span and the
    summed quadrature error.
    """
    _check_positive(a, "separation")
    if not T > 0:
        raise DomainError(f"temperature must be > 0 K, got {T!r}; use energy_plates_zero_T")
    resp = as_response(material)
    step = matsubara_frequency(T, 1)
    value, err = _y_integral(resp, a, 0.0, 0.0, rel_tol)
    terms, errors = [0.5 * value], [0.5 * err]
    running = terms[0]
    start, stop = 1, None
    while stop is None:
        l = np.arange(start, start + BLOCK)
        xi = step * l
        y_l = 2.0 * a * xi / HBAR_C
        keep = y_l <= Y_SPAN
        values, errs = _term_block(resp, a, xi[keep], y_l[keep], rel_tol)
        for v, e in zip(values, errs):
            terms.append(float(v))
            errors.append(float(e))
            running += v
            if abs(v) <= MATSUBARA_CUTOFF * abs(running):
                stop = "cutoff"
                break
        else:
            if not keep.all():
                stop = "y_l"
        start += BLOCK
        if stop is None and start >= max_terms:
            raise ConvergenceError(f"Matsubara sum not converged after {max_terms} terms")
    prefactor = K_B * T / (8.0 * math.pi * a * a)
    energy = prefactor * math.fsum(terms)
    if full_output:
        info = {"terms": len(terms), "l_max": len(terms) - 1, "stop": stop,
                "y_span": Y_SPAN, "error": prefactor * math.fsum(errors)}
        return energy, info
    return energy


def energy_plates_zero_T(material, a, rel_tol=DEFAULT_REL_TOL, full_output=False):
    """Zero-temperature Casimir energy per unit area (eV/nm**2)."""
    _check_positive(a, "separation")
    resp = as_response(material)
    inner_tol = 0.1 * rel_tol

    def outer(t):
        out = np.empty_like(t)
        for i, t_i in enumerate(t):
            out[i] = _y_integral(resp, a, t_i * HBAR_C / (2.0 * a), t_i, inner_tol)[0]
        return out

    res = integrate(outer, 0.0, Y_SPAN, rel_tol=rel_tol)
    prefactor = HBAR_C / (32.0 * math.pi**2 * a**3)
    energy = prefactor * res.value
    if full_output:
        return energy, {"evaluations": res.evaluations, "y_span": Y_SPAN,
                        "error": prefactor * res.error}
    return energy


def _warn_pfa(a, R):
    if a / R > 0.01:
        warnings.warn(f"a/R = {a / R:.3g} > 0.01: the proximity force approximation "
                      "is outside its regime of validity", stacklevel=3)


def force_sphere_plate(material, a, T, R, rel_tol=DEFAULT_REL_TOL):
    """PFA sphere-plate force magnitude ``2 pi R |F(a, T)|`` in pN."""
    _check_positive(a, "separation")
    _check_positive(R, "sphere radius")
    if T < 0:
        raise DomainError(f"temperature must be >= 0 K, got {T!r}")
    _warn_pfa(a, R)
    if T == 0:
        energy = energy_plates_zero_T(material, a, rel_tol)
    else:
        energy = free_energy_plates(material, a, T, rel_tol)
    return 2.0 * math.pi * R * abs(energy) * PN_PER_EV_NM


@dataclass(frozen=True)
class LifshitzConfig:
    separation: float
    temperature: float = 300.0
    sphere_radius: float = 95650.0
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        _check_positive(self.separation, "separation")
        _check_positive(self.sphere_radius, "sphere radius")
        if not (math.isfinite(self.temperature) and self.temperature >= 0):
            raise DomainError(f"temperature must be >= 0 K, got {self.temperature!r}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol!r}")

    def force(self, material):
        return force_sphere_plate(material, self.separation, self.temperature,
                                  self.sphere_radius, self.rel_tol)


def round_sig(x, digits=4):
    """Round to ``digits`` significant figures, ties to even on the decimal value."""
    if x == 0 or not math.isfinite(x):
        return x
    d = Decimal(repr(x))
    exponent = d.adjusted() - digits + 1
    return float(d.quantize(Decimal(1).scaleb(exponent), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class ForceTable:
    """Rows of ``(separation nm, force magnitude pN)``."""

    rows: tuple[tuple[float, float], ...]
    model_label: str
    temperature: float
    sphere_radius: float = field(default=95650.0)

    def __post_init__(self):
        rows = tuple((float(a), float(f)) for a, f in self.rows)
        object.__setattr__(self, "rows", rows)
        for a, f in rows:
            if not f > 0:
                raise ValidationError(f"force at a={a} nm must be positive, got {f!r}")
        for (a0, f0), (a1, f1) in zip(rows, rows[1:]):
            if not a1 > a0:
                raise ValidationError("separations must be strictly ascending")
            if not f1 < f0:
                raise ValidationError(f"force must decrease with separation ({a0} -> {a1} nm)")

    @property
    def separations(self):
        return [a for a, _ in self.rows]

    @property
    def forces(self):
        return [f for _, f in self.rows]

    def rounded(self, digits=4) -> "ForceTable":
        return ForceTable(tuple((a, round_sig(f, digits)) for a, f in self.rows),
                          self.model_label, self.temperature, self.sphere_radius)


def force_table(model, separations, T=300.0, R=95650.0, rel_tol=DEFAULT_REL_TOL) -> ForceTable:
    """Sphere-plate force at each separation; ``T = 0`` uses the zero-temperature formula."""
    seps = [float(a) for a in separations]
    if not seps:
        raise ValidationError("need at least one separation")
    for a0, a1 in zip(seps, seps[1:]):
        if not a1 > a0:
            raise ValidationError(f"separations must be strictly ascending ({a0} then {a1})")
    resp = as_response(model)
    rows = tuple((a, force_sphere_plate(resp, a, T, R, rel_tol)) for a in seps)
    return ForceTable(rows, resp.label, float(T), float(R))
