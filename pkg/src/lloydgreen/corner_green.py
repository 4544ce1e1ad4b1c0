"""Field-free Lloyd interferometer.

Mirror-image Green's function of the corner formed by the mirror plane
``y = 0`` and the source plane ``z = 0``, the exact slit wave function as a
pair of Hankel window integrals, and its far-field narrow-slit limit.

Internally all lengths are multiplied by ``k`` so that the kernels see the
dimensionless arguments ``k*R``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from . import specfun
from .errors import InvariantError, PhaseAccuracyWarning, QuadratureError, SingularityError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_adaptive, vector_valued

__all__ = [
    "CornerGeometry",
    "FreeBeam",
    "ScanPoint",
    "PHASE_LIMIT",
    "green_corner",
    "psi_exact",
    "psi_asymptotic",
    "scan_screen_free",
]

#: Largest phase k*R evaluated without a PhaseAccuracyWarning.
PHASE_LIMIT = 1.0e7


@dataclass(frozen=True)
class CornerGeometry:
    """Slit and screen placement.

    Parameters
    ----------
    y_sl : float
        Height of the slit centre above the mirror plane.
    delta : float
        Slit width along y.
    screen_z : float
        Distance from the source plane to the screen.
    """

    y_sl: float
    delta: float
    screen_z: float

    def __post_init__(self):
        for name in ("y_sl", "delta", "screen_z"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise InvariantError("must be a positive finite length", name)
        if not self.y_sl - self.delta / 2 > 0:
            raise InvariantError(
                "slit entirely above the mirror plane requires y_sl - delta/2 > 0", "y_sl")


@dataclass(frozen=True)
class FreeBeam:
    """Wave number and slit amplitude of the field-free beam."""

    k: float
    amplitude_c: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise InvariantError("wave number must be positive", "k")
        c = complex(self.amplitude_c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise InvariantError("amplitude must be finite", "amplitude_c")
        object.__setattr__(self, "amplitude_c", c)


class ScanPoint(tuple):
    """``(y, psi, intensity)`` with an extra ``flags`` attribute (warning tokens)."""

    def __new__(cls, y, psi, intensity, flags=()):
        self = super().__new__(cls, (y, psi, intensity))
        self.flags = tuple(flags)
        return self

    y = property(lambda self: self[0])
    psi = property(lambda self: self[1])
    intensity = property(lambda self: self[2])


def _check_phase(kr_max, stacklevel=3):
    if kr_max > PHASE_LIMIT:
        warnings.warn(f"phase k*R = {kr_max:.3g} exceeds {PHASE_LIMIT:.0e}; "
                      "double-precision phase is unreliable", PhaseAccuracyWarning,
                      stacklevel=stacklevel)
        return True
    return False


def green_corner(r, r_src, k: float):
    """Corner Green's function sum_{a,b=+-} a b exp(ik R_ab) / R_ab.

    ``R_ab = |(x - x', y - a y', z - b z')|``. Arguments broadcast over
    leading axes; the last axis holds ``(x, y, z)``.

    Raises
    ------
    SingularityError
        If the field point coincides with the source or one of its images.
    """
    r = np.asarray(r, dtype=float)
    rs = np.asarray(r_src, dtype=float)
    if r.shape[-1:] != (3,) or rs.shape[-1:] != (3,):
        raise ValueError("points must have 3 components in the last axis")
    if k < 0:
        raise ValueError("k must be non-negative")
    dx2 = (r[..., 0] - rs[..., 0]) ** 2
    scale = np.linalg.norm(r, axis=-1) + np.linalg.norm(rs, axis=-1)
    terms = {}
    kr_max = 0.0
    for a in (1.0, -1.0):
        dy2 = (r[..., 1] - a * rs[..., 1]) ** 2
        for b in (1.0, -1.0):
            rr = np.sqrt(dx2 + dy2 + (r[..., 2] - b * rs[..., 2]) ** 2)
            if np.any(rr <= 1e-12 * scale) or np.any(rr == 0):
                raise SingularityError("field point coincides with the source or an image")
            kr = k * rr
            kr_max = max(kr_max, float(np.max(kr)))
            terms[a, b] = np.exp(1j * kr) / rr
    # this pairing cancels exactly on all four Dirichlet planes
    total = (terms[1, 1] - terms[-1, 1]) - (terms[1, -1] - terms[-1, -1])
    _check_phase(kr_max)
    return complex(total) if np.ndim(total) == 0 else total


def _window_integrand(y, geometry, beam):
    """Integrand over the slit offset u (scaled) for every y; includes the prefactor."""
    k = beam.k
    y = np.asarray(y, dtype=float)
    c1 = k * (geometry.y_sl - y)
    c2 = k * (geometry.y_sl + y)
    zs = k * geometry.screen_z
    pref = beam.amplitude_c * 0.5j * zs

    def hank(t):
        rho = np.sqrt(t * t + zs * zs)
        return specfun.hankel1(1, rho) / rho

    def f(u):
        u = u[:, None]
        return pref * (hank(c1[None, :] + u) - hank(c2[None, :] + u))

    kr_max = float(np.sqrt((np.max(np.abs(np.concatenate([c1, c2]))) + k * geometry.delta / 2) ** 2 + zs ** 2))
    return vector_valued(f), kr_max


def psi_exact(y, geometry: CornerGeometry, beam: FreeBeam, spec: QuadratureSpec = DEFAULT_SPEC,
              *, return_result: bool = False):
    """Exact screen wave function from the two shifted Hankel window integrals.

    psi(y) = C (i k z / 2) [ int_{y_sl-d/2-y}^{y_sl+d/2-y} - int_{y_sl-d/2+y}^{y_sl+d/2+y} ]
             H1(k sqrt(t^2 + z^2)) / sqrt(t^2 + z^2) dt

    Both windows share the slit offset variable, so the integrand is exactly
    odd in ``y`` and vanishes identically at ``y = 0``.

    Parameters
    ----------
    y : float or array_like
        Screen coordinate(s). An array is integrated as one vector-valued
        integral with a common error estimate.
    return_result : bool
        Also return the underlying ``IntegralResult``.

    Raises
    ------
    QuadratureError
        If the window integral does not converge.
    """
    arr = np.asarray(y, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError("screen coordinates must be finite")
    f, kr_max = _window_integrand(arr, geometry, beam)
    _check_phase(kr_max)
    hw = 0.5 * beam.k * geometry.delta
    res = integrate_adaptive(f, -hw, hw, spec)
    if not res.converged:
        raise QuadratureError(
            f"slit window integral did not converge (error {res.err_estimate:.3g})", res)
    value = res.value.astype(complex)
    out = complex(value[0]) if np.ndim(y) == 0 else value.reshape(np.shape(y))
    return (out, res) if return_result else out


def psi_asymptotic(y, geometry: CornerGeometry, beam: FreeBeam):
    """Far-field, narrow-slit wave function (two point sources).

    psi = delta C z sqrt(k / 2 pi) e^{-i pi/4}
          [ e^{i k R-} / R-^{3/2} - e^{i k R+} / R+^{3/2} ],
    R-+ = sqrt((y_sl -+ y)^2 + z^2).
    """
    y = np.asarray(y, dtype=float)
    k, z = beam.k, geometry.screen_z
    rm = np.hypot(geometry.y_sl - y, z)
    rp = np.hypot(geometry.y_sl + y, z)
    _check_phase(k * float(np.max(np.maximum(rm, rp))))
    pref = geometry.delta * beam.amplitude_c * z * math.sqrt(k / (2 * math.pi)) * np.exp(-0.25j * math.pi)
    val = pref * (np.exp(1j * k * rm) / rm ** 1.5 - np.exp(1j * k * rp) / rp ** 1.5)
    return complex(val) if val.ndim == 0 else val


def scan_screen_free(geometry: CornerGeometry, beam: FreeBeam, y_grid: Sequence[float],
                     method: str = "exact", spec: QuadratureSpec = DEFAULT_SPEC,
                     *, on_error: str = "raise") -> List[ScanPoint]:
    """Evaluate psi and intensity |psi|^2 along the screen, preserving grid order.

    Parameters
    ----------
    method : {"exact", "asymptotic"}
    on_error : {"raise", "flag"}
        With ``"flag"`` a failing point gives ``psi = nan`` and a flag token
        instead of an exception.

    Returns
    -------
    list of ScanPoint
        ``(y, psi, intensity)`` tuples; ``point.flags`` lists warning tokens
        (``phase_accuracy``, ``nonconverged``).
    """
    if method not in ("exact", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")
    if on_error not in ("raise", "flag"):
        raise ValueError(f"unknown on_error {on_error!r}")
    ys = np.asarray(y_grid, dtype=float)
    if ys.ndim != 1 or not np.all(np.isfinite(ys)):
        raise ValueError("y_grid must be a finite 1-d sequence")

    def one(y):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PhaseAccuracyWarning)
            if method == "asymptotic":
                psi = psi_asymptotic(y, geometry, beam)
            else:
                psi = psi_exact(y, geometry, beam, spec)
        flags = ["phase_accuracy"] if any(issubclass(w.category, PhaseAccuracyWarning)
                                          for w in caught) else []
        return psi, flags

    try:
        psis, flags = one(ys)
        per_point = [list(flags) for _ in ys]
    except QuadratureError:
        # retry point by point to locate the failures
        psis = np.empty(len(ys), dtype=complex)
        per_point = []
        for i, y in enumerate(ys):
            try:
                p, fl = one(float(y))
            except QuadratureError as exc:
                if on_error == "raise":
                    raise QuadratureError(f"point {i} (y={y!r}): {exc}", exc.result) from exc
                p, fl = complex(math.nan, math.nan), ["nonconverged"]
            psis[i] = p
            per_point.append(fl)
    if on_error == "raise" and any("phase_accuracy" in fl for fl in per_point):
        warnings.warn("phase k*R exceeds the double-precision bound on part of the grid",
                      PhaseAccuracyWarning, stacklevel=2)
    psis = np.atleast_1d(psis)
    return [ScanPoint(float(y), complex(p), float(abs(p) ** 2), fl)
            for y, p, fl in zip(ys, psis, per_point)]
