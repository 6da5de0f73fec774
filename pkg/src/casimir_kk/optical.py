"""Tabulated optical constants and the imaginary-axis permittivity they imply.

Tables hold ``(omega_eV, n, k)`` rows.  Inside the table the loss
``eps'' = 2 n k`` is interpolated linearly in log-log space.  Outside it an
:class:`ExtrapolationPolicy` decides: a Drude tail below the data, and an
``C / omega**3`` tail fitted to the top decade above it.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ExtrapolationError, ParseError, ValidationError
from .quadrature import integrate_pieces

__all__ = [
    "OpticalDataset",
    "DrudeTail",
    "ExtrapolationPolicy",
    "load_nk_table",
    "save_nk_table",
    "eps_imag_from_data",
    "eps_imag_axis_from_data",
    "TabulatedLoss",
    "dataset_from_permittivity",
]

HEADER = ("omega_eV", "n", "k")


@dataclass(frozen=True, eq=False)
class OpticalDataset:
    omega: np.ndarray
    n: np.ndarray
    k: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        arrays = []
        for name in ("omega", "n", "k"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise ValidationError(f"{name} must be one-dimensional")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            arrays.append(arr)
        omega, n, k = arrays
        if not (omega.size == n.size == k.size):
            raise ValidationError("omega, n and k must have equal length")
        if omega.size < 2:
            raise ValidationError("an optical table needs at least 2 samples")
        for name, arr in zip(HEADER, arrays):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise ValidationError(f"row {bad[0] + 1}: {name} is not finite")
        if omega[0] <= 0:
            raise ValidationError("row 1: omega_eV must be > 0")
        step = np.flatnonzero(np.diff(omega) <= 0)
        if step.size:
            i = step[0] + 1
            raise ValidationError(
                f"row {i + 1}: omega_eV={float(omega[i])!r} is not greater than the "
                f"previous row ({float(omega[i - 1])!r})")
        for name, arr in (("n", n), ("k", k)):
            neg = np.flatnonzero(arr < 0)
            if neg.size:
                raise ValidationError(f"row {neg[0] + 1}: {name}={float(arr[neg[0]])!r} is negative")

    def __len__(self):
        return self.omega.size

    @property
    def loss(self) -> np.ndarray:
        """``eps'' = 2 n k`` at the table nodes."""
        return 2.0 * self.n * self.k


@dataclass(frozen=True)
class DrudeTail:
    """Low-frequency Drude loss ``wp**2 g / (w (w**2 + g**2))``."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_p) and self.omega_p > 0):
            raise ValidationError(f"Drude tail plasma energy must be > 0, got {self.omega_p!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValidationError(f"Drude tail relaxation must be > 0, got {self.gamma!r}")

    def __call__(self, omega):
        return self.omega_p**2 * self.gamma / (omega * (omega**2 + self.gamma**2))


@dataclass(frozen=True)
class ExtrapolationPolicy:
    """How ``eps''`` continues outside the table.

    ``low`` is a :class:`DrudeTail` or None (no data below the table);
    ``high_side`` enables the fitted ``C / omega**3`` tail above it.
    """

    low: DrudeTail | None = None
    high_side: bool = True

    @classmethod
    def none(cls) -> "ExtrapolationPolicy":
        return cls(low=None, high_side=False)


def _policy(policy):
    return ExtrapolationPolicy.none() if policy is None else policy


def load_nk_table(path, source_label=None) -> OpticalDataset:
    """Read a CSV table with header ``omega_eV,n,k``; ``#`` starts a comment line."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read optical table: {exc.strerror}", path) from exc
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in next(csv.reader([stripped]))]
        if not header_seen:
            if tuple(fields) != HEADER:
                raise ParseError(
                    f"expected header {','.join(HEADER)!r}, got {stripped!r}", path, lineno)
            header_seen = True
            continue
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", path, lineno)
        try:
            rows.append(tuple(float(f) for f in fields))
        except ValueError as exc:
            raise ParseError(f"not a number: {exc}", path, lineno) from exc
    if not header_seen:
        raise ParseError("missing header line", path)
    if not rows:
        raise ValidationError(f"{path}: table has no data rows")
    data = np.array(rows)
    return OpticalDataset(data[:, 0], data[:, 1], data[:, 2],
                          source_label=source_label or path.name)


def save_nk_table(dataset: OpticalDataset, path) -> None:
    """Write ``dataset`` in the format read by :func:`load_nk_table`."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if dataset.source_label:
            fh.write(f"# {dataset.source_label}\n")
        w.writerow(HEADER)
        for row in zip(dataset.omega, dataset.n, dataset.k):
            w.writerow([float(v) for v in row])


@dataclass(frozen=True, eq=False)
class TabulatedLoss:
    """``eps''(omega)`` backed by a table: log-log interpolation plus tails."""

    dataset: OpticalDataset
    policy: ExtrapolationPolicy
    tail_coeff: float

    @classmethod
    def build(cls, dataset, policy=None):
        policy = _policy(policy)
        w, loss = dataset.omega, dataset.loss
        top = (w >= w[-1] / 10.0) & (loss > 0)
        coeff = 0.0
        if top.any():
            # least squares for log C with the exponent pinned at -3
            coeff = float(np.exp(np.mean(np.log(loss[top]) + 3.0 * np.log(w[top]))))
        return cls(dataset, policy, coeff)

    @property
    def lower(self):
        return 0.0 if self.policy.low is not None else float(self.dataset.omega[0])

    @property
    def upper(self):
        return math.inf if self.policy.high_side else float(self.dataset.omega[-1])

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if w.size and not np.all(w > 0):
            raise DomainError("omega must be > 0")
        nodes, loss = self.dataset.omega, self.dataset.loss
        below, above = w < nodes[0], w > nodes[-1]
        if below.any() and self.policy.low is None:
            raise ExtrapolationError(
                f"omega={float(w[below].min())!r} eV is below the table ({float(nodes[0])!r} eV) "
                "and no low-frequency extrapolation is configured")
        if above.any() and not self.policy.high_side:
            raise ExtrapolationError(
                f"omega={float(w[above].max())!r} eV is above the table ({float(nodes[-1])!r} eV) "
                "and no high-frequency extrapolation is configured")

        out = np.empty_like(w)
        inside = ~(below | above)
        wi = w[inside]
        j = np.clip(np.searchsorted(nodes, wi, side="right") - 1, 0, nodes.size - 2)
        y0, y1 = loss[j], loss[j + 1]
        s = (np.log(wi) - np.log(nodes[j])) / (np.log(nodes[j + 1]) - np.log(nodes[j]))
        positive = (y0 > 0) & (y1 > 0)
        safe0, safe1 = np.where(positive, y0, 1.0), np.where(positive, y1, 1.0)
        loglog = np.exp(np.log(safe0) * (1.0 - s) + np.log(safe1) * s)
        # a zero-loss node falls back to linear-in-log(omega) interpolation
        vals = np.where(positive, loglog, y0 * (1.0 - s) + y1 * s)
        vals = np.where(nodes[j + 1] == wi, y1, vals)
        out[inside] = np.where(nodes[j] == wi, y0, vals)
        if below.any():
            out[below] = self.policy.low(w[below])
        if above.any():
            out[above] = self.tail_coeff / w[above] ** 3
        return out if out.ndim else float(out)

    def imag_axis(self, xi, include_plasma_pole=False, omega_p=None, tol=1e-9):
        """``eps(i xi)``; see :func:`eps_imag_axis_from_data`."""
        if not (math.isfinite(xi) and xi > 0):
            raise DomainError(f"xi must be finite and > 0, got {xi!r}")
        if include_plasma_pole and not (omega_p and omega_p > 0):
            raise DomainError("include_plasma_pole requires omega_p > 0")
        return 1.0 + 2.0 * self.loss_integral(xi * xi, tol) / math.pi + (
            omega_p**2 / xi**2 if include_plasma_pole else 0.0)

    def loss_integral(self, xi2, tol=1e-9):
        """``int x eps''(x) / (x**2 + xi2) dx`` over the span where ``eps''`` is defined."""

        def f(x):
            return x * self(x) / (x * x + xi2)

        nodes = self.dataset.omega
        lo, hi = self.lower, self.upper
        pieces = []
        first, last = nodes[0], nodes[-1]
        if lo < first:
            pieces.append((f, lo, first))
        # table nodes seed the subdivision since the interpolant has kinks there
        pieces.append((f, first, last, nodes[1:-1]))
        if hi > last:
            pieces.append((f, last, hi))
        return integrate_pieces(pieces, rel_tol=tol, abs_tol=tol).value


def eps_imag_from_data(dataset, policy, omega):
    """``eps''(omega)`` from the table, extrapolated according to ``policy``."""
    return TabulatedLoss.build(dataset, policy)(omega)


def eps_imag_axis_from_data(dataset, policy, include_plasma_pole, omega_p, xi, tol=1e-9):
    """``eps(i xi)`` from tabulated losses.

    The loss integral runs over the frequencies where ``eps''`` is defined:
    from zero when a low-side tail is configured, otherwise from the first
    table node, and likewise at the top.  ``omega_p**2 / xi**2`` is added only
    when ``include_plasma_pole`` is set; leave it unset when a Drude tail
    already carries the free-electron response.
    """
    return TabulatedLoss.build(dataset, policy).imag_axis(xi, include_plasma_pole, omega_p, tol)


def dataset_from_permittivity(omega, eps, source_label="synthetic") -> OpticalDataset:
    """Convert complex permittivity samples to an ``(omega, n, k)`` table."""
    eps = np.asarray(eps, dtype=complex)
    nk = np.sqrt(eps)
    # principal branch keeps both n and k non-negative for eps'' >= 0
    return OpticalDataset(np.asarray(omega, dtype=float), nk.real, np.abs(nk.imag), source_label)
