"""Principal-value quadrature and generalized Kramers-Kronig transforms.

For a permittivity with a second-order pole ``-wp**2 / w**2`` at zero
frequency the dispersion relations acquire explicit pole terms::

    eps'(w)   = 1 + (1/pi) PV int eps''(x) / (x - w) dx - wp**2 / w**2
    eps''(w)  = -(1/pi) PV int [eps'(x) + wp**2 / x**2] / (x - w) dx
    eps(i xi) = 1 + (1/pi) int x eps''(x) / (x**2 + xi**2) dx + wp**2 / xi**2

with all integrals over the whole real line.  The pole itself is never
integrated numerically; it only enters through the closed-form terms.
Samplers are supplied on the positive half-line and extended internally
(``eps''`` odd, ``eps'`` even), which folds every transform onto ``(0, inf)``.

Passing ``omega_p=0`` recovers the standard relations, which is the right
choice for Drude-type permittivities whose pole is first order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import models
from .errors import DomainError, UnsupportedModelError
from .quadrature import integrate, integrate_pieces

__all__ = [
    "PVIntegrand",
    "KKResult",
    "pv_integral",
    "kk_real_from_imag",
    "kk_imag_from_real",
    "kk_imag_axis",
    "verify_oscillator_identity",
    "pole_strength",
    "kk_round_trip",
]

DEFAULT_TOL = 1e-9
DEFAULT_BUDGET = 1_000_000


@dataclass(frozen=True)
class PVIntegrand:
    """A (possibly singular) integrand.

    ``sampler`` is the full integrand, vectorised over numpy arrays, with an
    optional simple pole at ``singularity``.
    """

    sampler: Callable[[np.ndarray], np.ndarray]
    singularity: float | None = None
    domain: tuple[float, float] = (-math.inf, math.inf)


@dataclass(frozen=True)
class KKResult:
    value: float
    error_estimate: float
    evaluations: int


def pv_integral(integrand: PVIntegrand, tol: float = DEFAULT_TOL,
                max_evals: int = DEFAULT_BUDGET) -> KKResult:
    """Cauchy principal value of ``integrand`` over its domain.

    The symmetric window ``(x0 - h, x0 + h)`` around the singularity is folded
    onto ``(0, h)`` as ``f(x0 + t) + f(x0 - t)``.  This removes the odd pole
    part exactly (its principal value over a symmetric window is zero) and
    leaves a bounded integrand; the GK nodes never touch ``t = 0``.  On a
    doubly infinite domain the fold covers the whole line, which also fixes
    the symmetric limit at infinity.

    Convergence is declared when the error estimate is below
    ``max(tol, tol * |value|)``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    lo, hi = (float(v) for v in integrand.domain)
    if not lo < hi:
        raise DomainError(f"empty integration domain ({lo}, {hi})")
    f = integrand.sampler
    x0 = integrand.singularity

    if x0 is None:
        res = integrate(f, lo, hi, rel_tol=tol, abs_tol=tol, max_evals=max_evals)
        return KKResult(res.value, res.error, res.evaluations)

    x0 = float(x0)
    if not lo < x0 < hi:
        raise DomainError(
            f"singularity {x0} must lie strictly inside the domain ({lo}, {hi})")

    def folded(t):
        return f(x0 + t) + f(x0 - t)

    if math.isinf(lo) and math.isinf(hi):
        pieces = [(folded, 0.0, math.inf)]
    else:
        h = min(x0 - lo, hi - x0)
        pieces = [(folded, 0.0, h)]
        if x0 - lo > h:
            pieces.append((f, lo, x0 - h))
        if hi - x0 > h:
            pieces.append((f, x0 + h, hi))
    res = integrate_pieces(pieces, rel_tol=tol, abs_tol=tol, max_evals=max_evals)
    return KKResult(res.value, res.error, res.evaluations)


def _check_frequency(value, name):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def kk_real_from_imag(eps_imag_sampler, omega_p, omega, tol=DEFAULT_TOL):
    """Real part ``eps'(omega)`` reconstructed from ``eps''`` on ``(0, inf)``."""
    _check_frequency(omega, "omega")
    w = float(omega)

    def f(x):
        return eps_imag_sampler(x) * (2.0 * x) / ((x - w) * (x + w))

    res = pv_integral(PVIntegrand(f, singularity=w, domain=(0.0, math.inf)), tol)
    return 1.0 + res.value / math.pi - omega_p**2 / w**2


def pole_strength(eps_real_sampler, omega_p):
    """Leftover ``1/x**2`` coefficient of ``eps'(x) + wp**2/x**2`` near zero.

    Zero (to rounding) when ``omega_p`` matches the sampler's pole.
    """
    x1 = 1e-5 * max(omega_p, 1.0)
    x2 = 0.1 * x1
    probe = np.array([x1, x2])
    h = np.asarray(eps_real_sampler(probe), dtype=float) + omega_p**2 / probe**2
    return (h[1] - h[0]) / (1.0 / x2**2 - 1.0 / x1**2)


def kk_imag_from_real(eps_real_sampler, omega_p, omega, tol=DEFAULT_TOL, dc_term=0.0):
    """Dissipative part ``eps''(omega)`` reconstructed from ``eps'`` on ``(0, inf)``.

    ``dc_term`` is the residue of a first-order (conducting) pole, added as
    ``dc_term / omega``; for a Drude permittivity it equals ``wp**2 / g0``.

    Raises :class:`DomainError` when ``eps' + wp**2/x**2`` still diverges at
    the origin, i.e. when ``omega_p`` does not match the sampler.
    """
    _check_frequency(omega, "omega")
    c = pole_strength(eps_real_sampler, omega_p)
    if abs(c) > 1e-6 * max(omega_p**2, 1.0):
        raise DomainError(
            f"eps'(x) + omega_p**2/x**2 diverges at x -> 0 (residual pole strength "
            f"{c:.6g} eV^2); omega_p={omega_p!r} does not match the data")
    w = float(omega)

    # the constant 1 has zero principal value and is removed analytically
    def f(x):
        excess = eps_real_sampler(x) + omega_p**2 / x**2 - 1.0
        return excess * (2.0 * w) / ((x - w) * (x + w))

    res = pv_integral(PVIntegrand(f, singularity=w, domain=(0.0, math.inf)), tol)
    return -res.value / math.pi + dc_term / w


def kk_imag_axis(eps_imag_sampler, omega_p, xi, tol=DEFAULT_TOL):
    """``eps(i xi)`` from ``eps''`` on the real axis plus the pole term."""
    _check_frequency(xi, "xi")
    x2 = float(xi) ** 2

    def f(x):
        return x * eps_imag_sampler(x) / (x * x + x2)

    res = pv_integral(PVIntegrand(f, domain=(0.0, math.inf)), tol)
    return 1.0 + 2.0 * res.value / math.pi + omega_p**2 / x2


def verify_oscillator_identity(beta, tol=1e-13):
    """Evaluate the two quartic integrals that close the oscillator KK check.

    Returns ``(I0, I2, closed_form)`` where::

        I0 = int dy / (y**4 - 2 beta y**2 + 1)
        I2 = int y**2 dy / (y**4 - 2 beta y**2 + 1)
        closed_form = pi / sqrt(2 (1 - beta))

    over the real line.  Both integrands are even, so only ``(0, inf)`` is
    integrated, with a breakpoint at the peak ``y = sqrt(beta)``.
    """
    beta = float(beta)
    if not (math.isfinite(beta) and beta < 1.0):
        raise DomainError(f"beta must be < 1, got {beta!r}")
    points = (math.sqrt(beta),) if beta > 0 else ()

    def quartic(y):
        y2 = y * y
        return (y2 - beta) ** 2 + (1.0 - beta) * (1.0 + beta)

    def i0(y):
        return 1.0 / quartic(y)

    def i2(y):
        return y * y / quartic(y)

    r0 = integrate(i0, 0.0, math.inf, points=points, rel_tol=tol)
    r2 = integrate(i2, 0.0, math.inf, points=points, rel_tol=tol)
    return 2.0 * r0.value, 2.0 * r2.value, math.pi / math.sqrt(2.0 * (1.0 - beta))


def _pole_for(model):
    if isinstance(model, models.Drude):
        return 0.0
    if isinstance(model, models.GeneralizedPlasma):
        return model.omega_p
    raise UnsupportedModelError("KK round trip needs a closed-form model")


def kk_round_trip(model, real_grid=None, imag_grid=None, tol=DEFAULT_TOL):
    """Maximum relative deviation between the transforms and the closed forms.

    Returns a dict with keys ``real_from_imag``, ``imag_from_real`` and
    ``imag_axis``.  The ``imag_from_real`` residual is relative to
    ``max(|eps''|, 1e-3 |eps|)`` so the lossless case does not divide by zero.
    """
    omega_p = _pole_for(model)
    dc_term = model.f0 / model.damping if isinstance(model, models.Drude) else 0.0
    if real_grid is None:
        real_grid = np.geomspace(0.1, 100.0, 50)
    if imag_grid is None:
        imag_grid = np.geomspace(0.01, 100.0, 50)

    def imag_sampler(x):
        return models.eps_imag(model, x)

    def real_sampler(x):
        return models.eps_real(model, x)

    worst = {"real_from_imag": 0.0, "imag_from_real": 0.0, "imag_axis": 0.0}
    for w in real_grid:
        exact = complex(models.eval_complex(model, w))
        got = kk_real_from_imag(imag_sampler, omega_p, w, tol)
        worst["real_from_imag"] = max(worst["real_from_imag"],
                                      abs(got - exact.real) / abs(exact.real))
        got = kk_imag_from_real(real_sampler, omega_p, w, tol, dc_term)
        scale = max(abs(exact.imag), 1e-3 * abs(exact))
        worst["imag_from_real"] = max(worst["imag_from_real"], abs(got - exact.imag) / scale)
    for xi in imag_grid:
        exact = models.eval_imag_axis(model, xi)
        got = kk_imag_axis(imag_sampler, omega_p, xi, tol)
        worst["imag_axis"] = max(worst["imag_axis"], abs(got - exact) / exact)
    return worst
