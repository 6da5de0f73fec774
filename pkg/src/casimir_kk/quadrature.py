"""Vectorised globally adaptive Gauss-Kronrod (G10/K21) quadrature.

The integrand is called with 1-d numpy arrays of abscissae, so one call
evaluates every active subinterval at once.  Infinite limits are handled by
compactifying each infinite piece onto a finite parameter interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

__all__ = ["QuadResult", "gk21", "integrate", "integrate_pieces"]

# QUADPACK qk21 abscissae (positive half, descending) and weights
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525140221,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG10 = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full 21-point rule on [-1, 1], ordered left to right
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG10
GAUSS_WEIGHTS[19:10:-2] = _WG10

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    intervals: int


def _compactify(f, a, b):
    """Return ``(g, t0, t1, sign)`` with ``int_a^b f = sign * int_t0^t1 g``."""
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    lo_inf, hi_inf = math.isinf(a), math.isinf(b)
    if not lo_inf and not hi_inf:
        return f, a, b, sign
    if lo_inf and hi_inf:
        def g(t):
            d = 1.0 - t * t
            return f(t / d) * (1.0 + t * t) / (d * d)
        return g, -1.0, 1.0, sign
    if hi_inf:
        def g(t):
            d = 1.0 - t
            return f(a + t / d) / (d * d)
        return g, 0.0, 1.0, sign

    def g(t):
        d = 1.0 - t
        return f(b - t / d) / (d * d)
    return g, 0.0, 1.0, sign


def gk21(f, lo, hi):
    """21-point Kronrod estimate and error on each interval ``[lo, hi]``.

    ``lo`` and ``hi`` are broadcastable arrays; ``f`` receives abscissae of
    shape ``lo.shape + (21,)`` and must return an array of that shape.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[..., None] + half[..., None] * NODES
    fx = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise ConvergenceError(f"integrand is not finite at x={bad!r}")
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    # QUADPACK error heuristic
    mean = 0.5 * (fx @ KRONROD_WEIGHTS)
    resasc = np.abs(half) * (np.abs(fx - mean[..., None]) @ KRONROD_WEIGHTS)
    resabs = np.abs(half) * (np.abs(fx) @ KRONROD_WEIGHTS)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0, scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return kron, err


def _kronrod(g, lo, hi):
    return gk21(lambda x: np.reshape(g(x.ravel()), x.shape), lo, hi)


def integrate_pieces(pieces, *, rel_tol=1e-9, abs_tol=0.0, max_evals=1_000_000) -> QuadResult:
    """Integrate a sum of pieces ``[(f, a, b), ...]`` under one global error budget.

    A finite piece may carry a fourth element, a sorted sequence of interior
    breakpoints that become its initial subintervals.

    Converges when the summed error estimate is below
    ``max(abs_tol, rel_tol * |value|)``.  Raises :class:`ConvergenceError`
    when the evaluation budget is exhausted first.
    """
    if rel_tol <= 0 and abs_tol <= 0:
        raise ValueError("need rel_tol > 0 or abs_tol > 0")
    mapped, seeds = [], []
    for piece in pieces:
        f, a, b = piece[:3]
        if a == b:
            continue
        g, t0, t1, sign = _compactify(f, float(a), float(b))
        cuts = np.asarray(piece[3] if len(piece) > 3 else (), dtype=float)
        if cuts.size and (math.isinf(a) or math.isinf(b)):
            raise ValueError("breakpoints are only supported on finite pieces")
        cuts = cuts[(cuts > t0) & (cuts < t1)]
        mapped.append((g, t0, t1, sign))
        seeds.append(np.concatenate([[t0], cuts, [t1]]))
    if not mapped:
        return QuadResult(0.0, 0.0, 0, 0)

    # per piece: [lo, hi, value, error] arrays over its subintervals
    state = []
    evals = 0
    for (g, _, _, sign), edges in zip(mapped, seeds):
        lo, hi = edges[:-1], edges[1:]
        v, e = _kronrod(g, lo, hi)
        evals += 21 * lo.size
        state.append([lo, hi, sign * v, e])

    while True:
        total = math.fsum(np.concatenate([s[2] for s in state]))
        err_total = float(np.sum(np.concatenate([s[3] for s in state])))
        target = max(abs_tol, rel_tol * abs(total))
        if err_total <= target:
            break
        if evals >= max_evals:
            raise ConvergenceError(
                f"quadrature did not converge in {evals} evaluations: "
                f"value={total!r}, error estimate={err_total:.3g}, target={target:.3g}")
        n_int = sum(s[0].size for s in state)
        threshold = target / n_int
        refined_any = False
        for (g, _, _, sign), s in zip(mapped, state):
            lo, hi, val, err = s
            split = err > threshold
            split &= (hi - lo) > 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
            if not np.any(split):
                continue
            refined_any = True
            mid = 0.5 * (lo[split] + hi[split])
            child_lo = np.concatenate([lo[split], mid])
            child_hi = np.concatenate([mid, hi[split]])
            v, e = _kronrod(g, child_lo, child_hi)
            evals += 21 * child_lo.size
            keep = ~split
            new_lo = np.concatenate([lo[keep], child_lo])
            order = np.argsort(new_lo, kind="stable")
            s[0] = new_lo[order]
            s[1] = np.concatenate([hi[keep], child_hi])[order]
            s[2] = np.concatenate([val[keep], sign * v])[order]
            s[3] = np.concatenate([err[keep], e])[order]
        if not refined_any:
            raise ConvergenceError(
                f"quadrature cannot refine further: value={total!r}, "
                f"error estimate={err_total:.3g}, target={target:.3g}")

    return QuadResult(total, err_total, evals, sum(s[0].size for s in state))


def integrate(f, a, b, *, points=(), rel_tol=1e-9, abs_tol=0.0, max_evals=1_000_000) -> QuadResult:
    """Integrate vectorised ``f`` over ``[a, b]``; either limit may be infinite.

    ``points`` are interior breakpoints (kinks, peaks) used to seed the
    subdivision.
    """
    lo, hi, sign = (a, b, 1.0) if a <= b else (b, a, -1.0)
    cuts = sorted(float(p) for p in points if lo < p < hi)
    if cuts:
        pieces = [(f, lo, cuts[0]), (f, cuts[0], cuts[-1], cuts[1:-1]), (f, cuts[-1], hi)]
    else:
        pieces = [(f, lo, hi)]
    res = integrate_pieces(pieces, rel_tol=rel_tol, abs_tol=abs_tol, max_evals=max_evals)
    if sign < 0:
        res = QuadResult(-res.value, res.error, res.evaluations, res.intervals)
    return res
