"""Command-line interface.

Commands::

    casimir-kk eps          permittivity on a real or imaginary frequency grid
    casimir-kk kk-check     Kramers-Kronig round trip and oscillator identities
    casimir-kk force-table  sphere-plate Casimir force at a list of separations
    casimir-kk compare      residuals of the theory against an experiment file

Every option can also be given in a TOML file passed with ``--config``; keys
are the long option names (dashes or underscores).  Command-line values win.
Exit status is 0 on success, 1 when a check fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kramers_kronig as kk
from . import lifshitz, models, optical
from .errors import CasimirKKError, ConvergenceError, ParseError, ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

REFERENCE_SEPARATIONS = (60.0, 70.0, 80.0, 90.0, 100.0, 120.0, 150.0, 200.0, 250.0, 300.0)
IDENTITY_BETAS = (-0.5, 0.0, 0.5, 0.9, 0.99)
KK_THRESHOLD = 1e-3
IDENTITY_THRESHOLD = 1e-8
PATH_KEYS = ("material", "data", "experiment")

DEFAULTS = {
    "material": "gold",
    "model": "generalized",
    "axis": "imag",
    "grid_scale": "log",
    "temperature_K": 300.0,
    "radius_nm": 95650.0,
    "separations_nm": REFERENCE_SEPARATIONS,
    "zero_temperature": False,
    "round": False,
    "include_plasma_pole": False,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    material: str = "gold"
    model: str = "generalized"
    omega_p_eV: float | None = None
    g0_eV: float | None = None
    data: str | None = None
    drude_gamma_eV: float | None = None
    include_plasma_pole: bool = False
    tolerance: float | None = None
    output: str | None = None
    axis: str = "imag"
    grid_min: float | None = None
    grid_max: float | None = None
    grid_points: int | None = None
    grid_scale: str = "log"
    beta: tuple[float, ...] | None = None
    temperature_K: float = 300.0
    radius_nm: float = 95650.0
    separations_nm: tuple[float, ...] = REFERENCE_SEPARATIONS
    zero_temperature: bool = False
    round: bool = False
    experiment: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        seps = tuple(float(a) for a in self.separations_nm)
        if not seps:
            raise UsageError("separations must not be empty")
        if any(b <= a for a, b in zip(seps, seps[1:])):
            raise UsageError("separations must be strictly ascending")
        self.separations_nm = seps

    @property
    def temperature(self):
        return 0.0 if self.zero_temperature else float(self.temperature_K)


def _float_list(text):
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {exc}") from exc


def _common(p):
    p.add_argument("--config", help="TOML file with option values")
    p.add_argument("--material", help="'gold' or a TOML material file")
    p.add_argument("--model", choices=["generalized", "plasma", "drude", "tabulated"])
    p.add_argument("--omega-p-eV", dest="omega_p_eV", type=float, help="override the plasma energy")
    p.add_argument("--g0-eV", dest="g0_eV", type=float, help="Drude relaxation energy")
    p.add_argument("--data", help="optical table CSV (omega_eV,n,k) for --model tabulated")
    p.add_argument("--drude-gamma-eV", dest="drude_gamma_eV", type=float,
                   help="relaxation of the Drude extrapolation below the table")
    p.add_argument("--include-plasma-pole", dest="include_plasma_pole", action="store_true",
                   default=None, help="add omega_p**2/xi**2 to tabulated eps(i xi)")
    p.add_argument("--tolerance", type=float, help="relative quadrature tolerance")
    p.add_argument("-o", "--output", help="output file (default: stdout)")


def _force_options(p):
    p.add_argument("--temperature-K", dest="temperature_K", type=float)
    p.add_argument("--radius-nm", dest="radius_nm", type=float)
    p.add_argument("--separations-nm", dest="separations_nm", type=_float_list,
                   help="comma-separated, ascending")
    p.add_argument("--zero-temperature", dest="zero_temperature", action="store_true",
                   default=None, help="use the T = 0 Lifshitz formula")


def build_parser():
    parser = argparse.ArgumentParser(prog="casimir-kk", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eps", help="tabulate the permittivity")
    _common(p)
    p.add_argument("--axis", choices=["real", "imag"])
    p.add_argument("--grid-min", dest="grid_min", type=float)
    p.add_argument("--grid-max", dest="grid_max", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--grid-scale", dest="grid_scale", choices=["log", "linear"])

    p = sub.add_parser("kk-check", help="verify the generalized Kramers-Kronig relations")
    _common(p)
    p.add_argument("--beta", type=_float_list, help="override the identity beta values")

    p = sub.add_parser("force-table", help="sphere-plate force table")
    _common(p)
    _force_options(p)
    p.add_argument("--round", action="store_true", default=None,
                   help="round forces to 4 significant figures")

    p = sub.add_parser("compare", help="residuals against experimental mean forces")
    _common(p)
    _force_options(p)
    p.add_argument("--experiment", help="CSV with a_nm, force_pN and optional ci95_pN")
    return parser


def _load_config(path):
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    return {k.replace("-", "_"): v for k, v in doc.items()}


def resolve_config(args) -> RunConfig:
    values = dict(DEFAULTS)
    allowed = set(RunConfig.__dataclass_fields__) - {"command", "extra"}
    if args.config:
        base = Path(args.config).parent
        for key, value in _load_config(args.config).items():
            if key not in allowed:
                raise UsageError(f"unknown config key {key!r}")
            if key in ("separations_nm", "beta") and isinstance(value, str):
                value = _float_list(value)
            # file names in a config are relative to the config itself
            if key in PATH_KEYS and value != "gold":
                value = str(base / value)
            values[key] = value
    for key, value in vars(args).items():
        if key in allowed and value is not None:
            values[key] = value
    values = {k: v for k, v in values.items() if k in allowed}
    return RunConfig(command=args.command, **values)


def build_model(cfg: RunConfig):
    kind = cfg.model
    if kind == "tabulated":
        if not cfg.data:
            raise UsageError("--model tabulated needs --data")
        dataset = optical.load_nk_table(cfg.data)
        omega_p = cfg.omega_p_eV
        if omega_p is None:
            omega_p = _base_material("generalized", cfg).omega_p
        low = None
        if cfg.drude_gamma_eV is not None:
            low = optical.DrudeTail(omega_p, cfg.drude_gamma_eV)
        return models.Tabulated(dataset, optical.ExtrapolationPolicy(low=low, high_side=True),
                                include_plasma_pole=bool(cfg.include_plasma_pole),
                                omega_p=omega_p, label=f"tabulated ({dataset.source_label})")
    return _base_material(kind, cfg)


def _base_material(kind, cfg):
    if cfg.material == "gold":
        base = models.gold_default()
        omega_p = cfg.omega_p_eV if cfg.omega_p_eV is not None else base.omega_p
        if kind == "generalized":
            return models.GeneralizedPlasma(omega_p, base.oscillators, label=base.label)
        if kind == "plasma":
            return models.PurePlasma(omega_p, label="plasma")
        if cfg.g0_eV is None:
            raise UsageError("--model drude needs --g0-eV (no default relaxation is shipped)")
        return models.Drude(omega_p, cfg.g0_eV, base.oscillators, label="gold drude")
    path = Path(cfg.material)
    if not path.is_file():
        raise UsageError(f"material {cfg.material!r} is neither 'gold' nor a file")
    with path.open("rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ParseError(str(exc), path) from exc
    if cfg.omega_p_eV is not None:
        doc["omega_p_eV"] = cfg.omega_p_eV
    if cfg.g0_eV is not None:
        doc["g0_eV"] = cfg.g0_eV
    return models.material_from_mapping(doc, kind=kind, source=path)


def _open_output(cfg):
    if cfg.output:
        return open(cfg.output, "w", newline="")
    return _Stdout()


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()
        return False


def cmd_eps(cfg: RunConfig):
    if cfg.grid_min is None or cfg.grid_max is None or cfg.grid_points is None:
        raise UsageError("eps needs --grid-min, --grid-max and --grid-points")
    if cfg.grid_points < 1 or not 0 < cfg.grid_min <= cfg.grid_max:
        raise UsageError("grid needs 0 < min <= max and at least one point")
    if cfg.grid_scale == "log":
        grid = np.geomspace(cfg.grid_min, cfg.grid_max, cfg.grid_points)
    else:
        grid = np.linspace(cfg.grid_min, cfg.grid_max, cfg.grid_points)
    model = build_model(cfg)
    tol = cfg.tolerance or kk.DEFAULT_TOL
    with _open_output(cfg) as fh:
        w = csv.writer(fh, lineterminator="\n")
        if isinstance(model, models.Tabulated):
            loss = optical.TabulatedLoss.build(model.dataset, model.policy)
            if cfg.axis == "real":
                w.writerow(["omega_eV", "eps_imag"])
                for x in grid:
                    w.writerow([float(x), float(loss(float(x)))])
            else:
                w.writerow(["xi_eV", "eps_imag_axis"])
                for x in grid:
                    w.writerow([float(x), loss.imag_axis(float(x), model.include_plasma_pole,
                                                         model.omega_p, tol)])
        elif cfg.axis == "real":
            w.writerow(["omega_eV", "eps_real", "eps_imag"])
            for x in grid:
                e = models.eval_complex(model, float(x))
                w.writerow([float(x), e.real, e.imag])
        else:
            w.writerow(["xi_eV", "eps_imag_axis"])
            for x in grid:
                w.writerow([float(x), models.eval_imag_axis(model, float(x))])
    return 0


def cmd_kk_check(cfg: RunConfig, out=None):
    out = out or sys.stdout
    model = build_model(cfg)
    if isinstance(model, models.Tabulated):
        raise UsageError("kk-check needs a closed-form model")
    betas = list(cfg.beta) if cfg.beta is not None else list(IDENTITY_BETAS) + [
        models.oscillator_beta(o) for o in model.oscillators]
    # validate before the slow part so a bad override fails fast
    for b in betas:
        if not b < 1:
            raise kk.DomainError(f"identity beta must be < 1, got {b!r}")
    ok = True
    worst = kk.kk_round_trip(model, tol=cfg.tolerance or kk.DEFAULT_TOL)
    for name, value in worst.items():
        passed = value < KK_THRESHOLD
        ok &= passed
        print(f"round-trip {name:<15} max_rel_err={value:.3e} threshold={KK_THRESHOLD:.0e} "
              f"{'PASS' if passed else 'FAIL'}", file=out)
    for b in betas:
        i0, i2, closed = kk.verify_oscillator_identity(b)
        r0, r2 = abs(i0 - closed), abs(i2 - closed)
        passed = max(r0, r2) < IDENTITY_THRESHOLD
        ok &= passed
        print(f"identity beta={b:<10.6g} |I0-c|={r0:.3e} |I2-c|={r2:.3e} "
              f"threshold={IDENTITY_THRESHOLD:.0e} {'PASS' if passed else 'FAIL'}", file=out)
    print(f"kk-check {model.label}: {'PASS' if ok else 'FAIL'}", file=out)
    return 0 if ok else 1


def _table(cfg, separations):
    model = build_model(cfg)
    tol = cfg.tolerance or lifshitz.DEFAULT_REL_TOL
    return lifshitz.force_table(model, separations, cfg.temperature, cfg.radius_nm, tol)


def cmd_force_table(cfg: RunConfig):
    table = _table(cfg, cfg.separations_nm)
    if cfg.round:
        table = table.rounded(4)
    with _open_output(cfg) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a_nm", "force_pN", "model", "T_K"])
        for a, f in table.rows:
            w.writerow([a, f, table.model_label, table.temperature])
    return 0


@dataclass(frozen=True)
class ExperimentRecord:
    """Measured mean forces with 95% confidence half-widths."""

    separations: tuple[float, ...]
    mean_force: tuple[float, ...]
    ci95_halfwidth: tuple[float, ...]

    def __post_init__(self):
        if not self.separations:
            raise ValidationError("experiment file has no rows")
        if any(b <= a for a, b in zip(self.separations, self.separations[1:])):
            raise ValidationError("experiment separations must be strictly ascending")
        if any(h < 0 or not math.isfinite(h) for h in self.ci95_halfwidth):
            raise ValidationError("ci95 half-widths must be finite and >= 0")


def load_experiment(path) -> ExperimentRecord:
    """Read ``a_nm``, ``force_pN`` (or ``mean_force_pN``) and optional ``ci95_pN`` columns."""
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text().splitlines()
                 if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        raise ParseError(f"cannot read experiment file: {exc.strerror}", path) from exc
    reader = csv.DictReader(lines)
    header = [h.strip() for h in (reader.fieldnames or [])]
    reader.fieldnames = header
    force_col = "mean_force_pN" if "mean_force_pN" in header else "force_pN"
    for col in ("a_nm", force_col):
        if col not in header:
            raise ParseError(f"missing column {col!r} in header {','.join(header)!r}", path, 1)
    a, f, h = [], [], []
    for lineno, row in enumerate(reader, start=2):
        try:
            a.append(float(row["a_nm"]))
            f.append(float(row[force_col]))
            h.append(float(row["ci95_pN"]) if row.get("ci95_pN") not in (None, "") else 0.0)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad number: {exc}", path, lineno) from exc
    return ExperimentRecord(tuple(a), tuple(f), tuple(h))


def cmd_compare(cfg: RunConfig, err=None):
    err = err or sys.stderr
    if not cfg.experiment:
        raise UsageError("compare needs --experiment")
    exp = load_experiment(cfg.experiment)
    table = _table(cfg, exp.separations)
    inside = 0
    with _open_output(cfg) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a_nm", "residual_pN", "ci95_pN", "inside"])
        for (a, theory), mean, half in zip(table.rows, exp.mean_force, exp.ci95_halfwidth):
            residual = theory - mean
            ok = abs(residual) <= half
            inside += ok
            w.writerow([a, residual, half, int(ok)])
    print(f"inside error bars: {inside} of {len(exp.separations)}", file=err)
    return 0


COMMANDS = {
    "eps": cmd_eps,
    "kk-check": cmd_kk_check,
    "force-table": cmd_force_table,
    "compare": cmd_compare,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        parser.error(str(exc))
    except ConvergenceError as exc:
        print(f"casimir-kk: error: {exc}", file=sys.stderr)
        return 1
    except (CasimirKKError, OSError) as exc:
        print(f"casimir-kk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
