"""Command-line front end: ``lloyd scan`` and ``lloyd validate``.

Scenario files are JSON objects with the top-level keys ``mode``,
``geometry``, ``beam``, ``gravity``, ``screen_grid``, ``quadrature`` and
``units``. Unknown keys are rejected.

Exit codes: 0 success, 1 usage or configuration error, 2 computation
failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .corner_green import CornerGeometry, FreeBeam, scan_screen_free
from .errors import InvariantError, LloydError
from .gravity_green import HBAR, NEUTRON_MASS, STANDARD_GRAVITY, GravityContext, psi_gravity_scan
from .oracles import run_validation_suite
from .quadrature import QuadratureSpec

__all__ = [
    "ConfigError",
    "ConfigNotFoundError",
    "ConfigSyntaxError",
    "ConfigInvariantError",
    "Scenario",
    "ScanSummary",
    "parse_scenario",
    "scenario_from_dict",
    "run_scan",
    "run_validate",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COMPUTE = 2
EXIT_VALIDATION = 3

MODES = ("free-exact", "free-asymptotic", "gravity")
UNITS = ("SI", "internal")
FREE_HEADER = ["y", "re_psi", "im_psi", "intensity", "flags"]
GRAVITY_HEADER = ["x", "y", "re_psi", "im_psi", "intensity", "flags"]


class ConfigError(LloydError):
    """Base class of scenario configuration errors."""


class ConfigNotFoundError(ConfigError, FileNotFoundError):
    """The scenario file does not exist or cannot be read."""


class ConfigSyntaxError(ConfigError, ValueError):
    """The scenario file is not valid JSON."""


class ConfigInvariantError(ConfigError, ValueError):
    """A scenario value is missing, of the wrong type or violates an invariant."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class ScreenGrid:
    y_min: float
    y_max: float
    n_points: int
    x_min: float = 0.0
    x_max: float = 0.0
    n_x: int = 1

    def y_values(self):
        return np.linspace(self.y_min, self.y_max, self.n_points)

    def x_values(self):
        return np.linspace(self.x_min, self.x_max, self.n_x) if self.n_x > 1 else np.array([self.x_min])


@dataclass(frozen=True)
class Scenario:
    """Validated scan configuration. Lengths are in scenario units."""

    mode: str
    units: str
    geometry: CornerGeometry
    screen_grid: ScreenGrid
    quadrature: QuadratureSpec
    beam: Optional[FreeBeam] = None
    gravity: Optional[GravityContext] = None
    k_max: Optional[float] = None


@dataclass
class ScanSummary:
    rows: int
    warnings: List[str] = field(default_factory=list)


# -- parsing --------------------------------------------------------------------------

_TOP = {"mode", "geometry", "beam", "gravity", "screen_grid", "quadrature", "units"}
_GEOMETRY = {"y_sl", "delta", "screen_z"}
_BEAM = {"k", "amplitude_c"}
_GRAVITY = {"energy_e", "lambda", "amplitude_c", "mass_m", "accel_g", "hbar", "k_max"}
_GRID = {"y_min", "y_max", "n_points", "x_min", "x_max", "n_x"}
_QUAD = {"abs_tol", "rel_tol", "max_subdivisions", "tail_zero_pairs", "kperp_truncation"}


def _reject_unknown(obj, allowed, path):
    if not isinstance(obj, dict):
        raise ConfigInvariantError(path, "must be an object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigInvariantError(f"{path}.{extra[0]}" if path else extra[0], "unknown key")


def _number(obj, key, path, required=True, default=None):
    if key not in obj:
        if required:
            raise ConfigInvariantError(f"{path}.{key}", "missing required value")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigInvariantError(f"{path}.{key}", "must be a finite number")
    return float(v)


def _integer(obj, key, path, required=True, default=None):
    if key not in obj:
        if required:
            raise ConfigInvariantError(f"{path}.{key}", "missing required value")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigInvariantError(f"{path}.{key}", "must be an integer")
    return v


def _complex(obj, key, path, default):
    if key not in obj:
        return complex(default)
    v = obj[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        c = complex(v)
    elif (isinstance(v, list) and len(v) == 2
          and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        c = complex(v[0], v[1])
    else:
        raise ConfigInvariantError(f"{path}.{key}", "must be a number or [re, im]")
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ConfigInvariantError(f"{path}.{key}", "must be finite")
    return c


def _wrap_invariant(path, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except InvariantError as exc:
        sub = f"{path}.{exc.field}" if exc.field else path
        raise ConfigInvariantError(sub, str(exc).split(": ", 1)[-1]) from exc
    except ValueError as exc:
        raise ConfigInvariantError(path, str(exc)) from exc


def scenario_from_dict(data) -> Scenario:
    """Validate a parsed scenario object; see ``parse_scenario``."""
    _reject_unknown(data, _TOP, "")
    mode = data.get("mode")
    if mode not in MODES:
        raise ConfigInvariantError("mode", f"must be one of {', '.join(MODES)}")
    units = data.get("units", "SI")
    if units not in UNITS:
        raise ConfigInvariantError("units", f"must be one of {', '.join(UNITS)}")

    for key in ("geometry", "screen_grid"):
        if key not in data:
            raise ConfigInvariantError(key, "missing required section")
    geo = data["geometry"]
    _reject_unknown(geo, _GEOMETRY, "geometry")
    geometry = _wrap_invariant("geometry", CornerGeometry, _number(geo, "y_sl", "geometry"),
                               _number(geo, "delta", "geometry"), _number(geo, "screen_z", "geometry"))

    grid = data["screen_grid"]
    _reject_unknown(grid, _GRID, "screen_grid")
    y_min = _number(grid, "y_min", "screen_grid")
    y_max = _number(grid, "y_max", "screen_grid")
    n_points = _integer(grid, "n_points", "screen_grid")
    if not y_min < y_max:
        raise ConfigInvariantError("screen_grid.y_max", "must exceed y_min")
    if n_points < 2:
        raise ConfigInvariantError("screen_grid.n_points", "must be at least 2")
    gravity_keys = {"x_min", "x_max", "n_x"} & set(grid)
    if mode != "gravity" and gravity_keys:
        raise ConfigInvariantError(f"screen_grid.{sorted(gravity_keys)[0]}", "only valid in gravity mode")
    x_min = _number(grid, "x_min", "screen_grid", required=mode == "gravity")
    x_max = _number(grid, "x_max", "screen_grid", required=False, default=x_min)
    n_x = _integer(grid, "n_x", "screen_grid", required=mode == "gravity", default=1)
    if mode == "gravity":
        if n_x < 1:
            raise ConfigInvariantError("screen_grid.n_x", "must be at least 1")
        if n_x > 1 and not x_min < x_max:
            raise ConfigInvariantError("screen_grid.x_max", "must exceed x_min when n_x > 1")
    screen = ScreenGrid(y_min, y_max, n_points, x_min or 0.0, x_max or 0.0, n_x or 1)

    quad = data.get("quadrature", {})
    _reject_unknown(quad, _QUAD, "quadrature")
    qkw = {}
    for key in ("abs_tol", "rel_tol", "kperp_truncation"):
        if key in quad:
            qkw[key] = _number(quad, key, "quadrature")
    for key in ("max_subdivisions", "tail_zero_pairs"):
        if key in quad:
            qkw[key] = _integer(quad, key, "quadrature")
    quadrature = _wrap_invariant("quadrature", QuadratureSpec, **qkw)

    beam = ctx = k_max = None
    if mode in ("free-exact", "free-asymptotic"):
        if "beam" not in data:
            raise ConfigInvariantError("beam", f"required for mode {mode}")
        if "gravity" in data:
            raise ConfigInvariantError("gravity", f"not allowed for mode {mode}")
        b = data["beam"]
        _reject_unknown(b, _BEAM, "beam")
        if units == "internal":
            k = _number(b, "k", "beam", required=False, default=1.0)
            if k != 1.0:
                raise ConfigInvariantError("beam.k", "internal units measure lengths in 1/k, so k must be 1")
        else:
            k = _number(b, "k", "beam")
        beam = _wrap_invariant("beam", FreeBeam, k, _complex(b, "amplitude_c", "beam", 1.0))
    else:
        if "gravity" not in data:
            raise ConfigInvariantError("gravity", "required for mode gravity")
        if "beam" in data:
            raise ConfigInvariantError("beam", "not allowed for mode gravity")
        gsec = data["gravity"]
        _reject_unknown(gsec, _GRAVITY, "gravity")
        e = _number(gsec, "energy_e", "gravity")
        lam = _complex(gsec, "lambda", "gravity", 0.0)
        amp = _complex(gsec, "amplitude_c", "gravity", 1.0)
        if units == "internal":
            for key in ("mass_m", "accel_g", "hbar"):
                if key in gsec:
                    raise ConfigInvariantError(f"gravity.{key}", "fixed by internal units")
            ctx = GravityContext.internal(e, lam, amp)
        else:
            ctx = _wrap_invariant(
                "gravity", GravityContext,
                mass_m=_number(gsec, "mass_m", "gravity", required=False, default=NEUTRON_MASS),
                accel_g=_number(gsec, "accel_g", "gravity", required=False, default=STANDARD_GRAVITY),
                energy_e=e, lam=lam, amplitude_c=amp,
                hbar=_number(gsec, "hbar", "gravity", required=False, default=HBAR))
        k_max = _number(gsec, "k_max", "gravity", required=False)
        if k_max is not None and k_max <= 0:
            raise ConfigInvariantError("gravity.k_max", "must be positive")
    return Scenario(mode, units, geometry, screen, quadrature, beam, ctx, k_max)


def parse_scenario(path) -> Scenario:
    """Read and validate a JSON scenario file.

    Raises
    ------
    ConfigNotFoundError
        Missing or unreadable file.
    ConfigSyntaxError
        Malformed JSON.
    ConfigInvariantError
        Missing, unknown or invalid values; the message starts with the
        field path.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as exc:
        raise ConfigNotFoundError(f"scenario file not found: {path}") from exc
    except OSError as exc:
        raise ConfigNotFoundError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data)


# -- unit handling ---------------------------------------------------------------------

def length_scale(scenario: Scenario) -> float:
    """Scenario length unit expressed in internal units (multiply to convert)."""
    if scenario.mode == "gravity":
        return 1.0 / scenario.gravity.length_lg
    return scenario.beam.k


def to_internal_length(value, scenario: Scenario):
    return np.asarray(value, dtype=float) * length_scale(scenario)


def from_internal_length(value, scenario: Scenario):
    return np.asarray(value, dtype=float) / length_scale(scenario)


# -- scan --------------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _row_values(psi):
    if not (math.isfinite(psi.real) and math.isfinite(psi.imag)):
        return ["", "", ""]
    return [_fmt(psi.real), _fmt(psi.imag), _fmt(abs(psi) ** 2)]


def run_scan(scenario: Scenario, out) -> ScanSummary:
    """Run the screen scan of a scenario and write the CSV to ``out``.

    Rows are written in grid order (x outer, y inner in gravity mode).
    A point whose computation fails gets empty value cells and a flag.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    summary = ScanSummary(0)
    ys = scenario.screen_grid.y_values()
    if scenario.mode in ("free-exact", "free-asymptotic"):
        writer.writerow(FREE_HEADER)
        method = "exact" if scenario.mode == "free-exact" else "asymptotic"
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            points = scan_screen_free(scenario.geometry, scenario.beam, ys, method,
                                      scenario.quadrature, on_error="flag")
        for p in points:
            writer.writerow([_fmt(p.y)] + _row_values(p.psi) + [";".join(p.flags)])
            for tok in p.flags:
                summary.warnings.append(f"y={p.y!r}: {tok}")
            summary.rows += 1
    else:
        writer.writerow(GRAVITY_HEADER)
        xs = scenario.screen_grid.x_values()
        res = psi_gravity_scan(xs, ys, scenario.geometry, scenario.gravity, scenario.k_max,
                               scenario.quadrature, raise_on_failure=False)
        for i, x in enumerate(xs):
            flags = [] if res.converged[i] else ["nonconverged"]
            for j, y in enumerate(ys):
                psi = complex(res.psi[i, j])
                writer.writerow([_fmt(x), _fmt(y)] + _row_values(psi) + [";".join(flags)])
                summary.rows += 1
            if flags:
                summary.warnings.append(f"x={x!r}: nonconverged")
    data = buf.getvalue()
    if hasattr(out, "write"):
        out.write(data)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
    return summary


# -- validate --------------------------------------------------------------------------------

def format_report_line(r) -> str:
    return f"{r.check_name},{_fmt(r.measured)},{_fmt(r.bound)},{'true' if r.passed else 'false'}"


def run_validate(level: str, out=None, bi_scale: float = 1.0) -> int:
    """Run the validation suite and write ``check_name,measured,bound,passed`` lines.

    Returns 0 if every check passed and 3 otherwise.
    """
    reports = run_validation_suite(level, bi_scale=bi_scale)
    text = "".join(format_report_line(r) + "\n" for r in reports)
    if out is None:
        sys.stdout.write(text)
    elif hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VALIDATION


# -- entry point -------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lloyd", description="Lloyd-mirror interferometer Green's functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    scan = sub.add_parser("scan", help="evaluate the screen wave function of a scenario")
    scan.add_argument("--config", required=True, help="JSON scenario file")
    scan.add_argument("--out", required=True, help="CSV output file")
    scan.add_argument("--lambda-re", type=float, default=None,
                      help="override Re(lambda) (gravity mode)")
    scan.add_argument("--lambda-im", type=float, default=None,
                      help="override Im(lambda) (gravity mode)")

    val = sub.add_parser("validate", help="run the numerical validation suite")
    val.add_argument("--level", choices=("fast", "full"), default="fast")
    val.add_argument("--out", default=None, help="report file (default: standard output)")
    val.add_argument("--canary", action="store_true",
                     help="scale Bi by 1+1e-6 in the Wronskian check; the suite must fail")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate":
        try:
            return run_validate(args.level, args.out, bi_scale=1.0 + 1e-6 if args.canary else 1.0)
        except OSError as exc:
            print(f"lloyd: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except Exception as exc:  # noqa: BLE001
            print(f"lloyd: validation aborted: {exc}", file=sys.stderr)
            return EXIT_COMPUTE

    try:
        scenario = parse_scenario(args.config)
        if args.lambda_re is not None or args.lambda_im is not None:
            if scenario.mode != "gravity":
                raise ConfigInvariantError("--lambda-re/--lambda-im", "only valid in gravity mode")
            lam = scenario.gravity.lam
            lam = complex(lam.real if args.lambda_re is None else args.lambda_re,
                          lam.imag if args.lambda_im is None else args.lambda_im)
            scenario = Scenario(scenario.mode, scenario.units, scenario.geometry, scenario.screen_grid,
                                scenario.quadrature, scenario.beam, scenario.gravity.with_lambda(lam),
                                scenario.k_max)
    except ConfigError as exc:
        print(f"lloyd: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = run_scan(scenario, args.out)
    except OSError as exc:
        print(f"lloyd: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LloydError as exc:
        print(f"lloyd: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    for w in summary.warnings:
        print(f"lloyd: warning: {w}", file=sys.stderr)
    print(f"lloyd: wrote {summary.rows} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
