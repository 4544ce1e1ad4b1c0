"""Lloyd interferometer in a linear gravitational potential.

Coordinates: ``x`` along gravity (height), ``(y, z)`` transverse with the
mirror at ``y = 0`` and the source plane at ``z = 0``.

Internal units: lengths in ``l_g = (hbar^2 / 2 m^2 g)^(1/3)``, energies in
``m g l_g`` and wave numbers in ``1 / l_g``. Then the dimensionless height
is simply ``sigma = xi - e + kappa_y^2 + kappa_z^2``. Public functions take
and return quantities in the units of the context (SI unless the context
was built with ``GravityContext.internal``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import specfun
from ._backend import kernels
from .corner_green import CornerGeometry
from .errors import InvariantError, QuadratureError
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, integrate_adaptive,
                         integrate_kperp_2d, integrate_segments, vector_valued)

__all__ = [
    "HBAR",
    "NEUTRON_MASS",
    "STANDARD_GRAVITY",
    "GravityContext",
    "TransverseMode",
    "ScreenPoint3D",
    "PsiGravityResult",
    "sigma",
    "reduced_green",
    "reduced_green_internal",
    "ai_cutoff_sigma",
    "kperp_cutoff",
    "green_gravity_halfspace",
    "green_gravity_corner",
    "psi_gravity",
    "psi_gravity_scan",
]

# CODATA 2018 / conventional values
HBAR = 1.054571817e-34          # J s
NEUTRON_MASS = 1.67492750056e-27  # kg
STANDARD_GRAVITY = 9.80665      # m s^-2

# sigma above which the corner bracket is smooth and monotone (tail onset)
_TAIL_SIGMA = 2.0
# k_y below which sin(k y_sl) sin(k d/2) / k is replaced by its series
_KY_SERIES = 1e-6


@dataclass(frozen=True)
class GravityContext:
    """Particle, field and free constants of the gravitational problem.

    Parameters
    ----------
    mass_m, accel_g, energy_e : float
        Mass, gravitational acceleration (> 0) and total energy.
    lam : complex
        Coefficient of the homogeneous ``Ai(sigma) Ai(sigma')`` term, in the
        dimensionless convention of the screen wave function.
    amplitude_c : complex
        Slit normalisation.
    hbar : float
        Planck constant; override for dimensionless test contexts.
    """

    mass_m: float = NEUTRON_MASS
    accel_g: float = STANDARD_GRAVITY
    energy_e: float = 0.0
    lam: complex = 0.0
    amplitude_c: complex = 1.0
    hbar: float = HBAR
    length_lg: float = field(init=False)

    def __post_init__(self):
        for name in ("mass_m", "accel_g", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvariantError("must be positive and finite", name)
        if not math.isfinite(self.energy_e):
            raise InvariantError("must be finite", "energy_e")
        for name in ("lam", "amplitude_c"):
            c = complex(getattr(self, name))
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise InvariantError("must be finite", name)
            object.__setattr__(self, name, c)
        lg = (self.hbar ** 2 / (2.0 * self.mass_m ** 2 * self.accel_g)) ** (1.0 / 3.0)
        object.__setattr__(self, "length_lg", lg)

    @classmethod
    def internal(cls, energy_e: float = 0.0, lam: complex = 0.0, amplitude_c: complex = 1.0):
        """Context whose units are already the internal ones (``l_g = 1``, ``m g l_g = 1``)."""
        return cls(mass_m=1.0, accel_g=1.0, energy_e=energy_e, lam=lam,
                   amplitude_c=amplitude_c, hbar=math.sqrt(2.0))

    @property
    def energy_unit(self) -> float:
        return self.mass_m * self.accel_g * self.length_lg

    @property
    def e_internal(self) -> float:
        return self.energy_e / self.energy_unit

    def with_lambda(self, lam: complex) -> "GravityContext":
        return GravityContext(self.mass_m, self.accel_g, self.energy_e, lam,
                              self.amplitude_c, self.hbar)


@dataclass(frozen=True)
class TransverseMode:
    """Transverse wave vector and the shifted energy ``E - hbar^2 k^2 / 2m``."""

    k_y: float
    k_z: float
    e_tilde: float

    @classmethod
    def of(cls, ctx: GravityContext, k_y: float, k_z: float) -> "TransverseMode":
        e = ctx.energy_e - ctx.hbar ** 2 * (k_y * k_y + k_z * k_z) / (2.0 * ctx.mass_m)
        return cls(float(k_y), float(k_z), e)


@dataclass(frozen=True)
class ScreenPoint3D:
    """Field point ``(x, y, z)``; physical screen points have ``y >= 0`` and ``z > 0``."""

    x: float
    y: float
    z: float

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)


def sigma(x, mode: TransverseMode, ctx: GravityContext):
    """Dimensionless height ``(x - E_tilde / m g) / l_g``."""
    turning = mode.e_tilde / (ctx.mass_m * ctx.accel_g)
    return (np.asarray(x, dtype=float) - turning) / ctx.length_lg if np.ndim(x) else \
        (float(x) - turning) / ctx.length_lg


def _zeta(s):
    return np.where(s > 0, 2.0 / 3.0 * np.abs(s) ** 1.5, 0.0)


def reduced_green_internal(s, s_src, lam=0.0):
    """``lam Ai(s) Ai(s') + pi Ai(max) Bi(min)`` in internal units.

    Evaluated with exponentially scaled Airy functions, so large positive
    arguments neither overflow nor lose the ratio. Symmetric in its two
    arguments bit for bit.
    """
    s = np.asarray(s, dtype=float)
    s_src = np.asarray(s_src, dtype=float)
    hi = np.maximum(s, s_src)
    lo = np.minimum(s, s_src)
    ai_hi, _, _, _ = kernels.airy_scaled(np.ravel(hi))
    ai_lo, _, bi_lo, _ = kernels.airy_scaled(np.ravel(lo))
    ai_hi = ai_hi.reshape(hi.shape)
    ai_lo = ai_lo.reshape(lo.shape)
    bi_lo = bi_lo.reshape(lo.shape)
    zh, zl = _zeta(hi), _zeta(lo)
    val = math.pi * ai_hi * bi_lo * np.exp(zl - zh)
    lam = complex(lam)
    if lam != 0:
        hom = ai_hi * ai_lo * np.exp(-(zh + zl))
        val = (lam.real * hom + val) if lam.imag == 0 else (lam * hom + val)
    val = np.asarray(val)
    return val[()] if val.ndim == 0 else val


def reduced_green(x, x_src, mode: TransverseMode, ctx: GravityContext):
    """Reduced Green's function g(x, x'; k_perp), in units of length.

    ``g = l_g [lam Ai(s) Ai(s') + pi (Theta(x-x') Ai(s) Bi(s') + Theta(x'-x) Ai(s') Bi(s))]``
    with Theta(0) = 1/2. The two Theta branches coincide at ``x = x'``, so
    the Ai of the larger and Bi of the smaller argument is used throughout.

    Raises
    ------
    AiryRangeError
        If an argument leaves the supported Airy range.
    """
    s = sigma(x, mode, ctx)
    s2 = sigma(x_src, mode, ctx)
    arr = np.concatenate([np.atleast_1d(s), np.atleast_1d(s2)])
    specfun._check_airy(arr, False)
    val = ctx.length_lg * reduced_green_internal(s, s2, ctx.lam)
    return val


def ai_cutoff_sigma(bound: float) -> float:
    """A point just above the root of ``Ai(s) = bound`` on ``s > 0``, so ``Ai < bound`` beyond it."""
    if not 0 < bound < specfun.airy_ai(0.0):
        raise ValueError("bound must lie in (0, Ai(0))")
    f = lambda s: math.log(specfun.airy_ai(s)) - math.log(bound)  # noqa: E731
    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
    root = brentq(f, 0.0, hi, xtol=1e-13)
    # step past the root so the certificate holds strictly despite rounding
    return root + 1e-9 * max(1.0, root)


def kperp_cutoff(s_base: float, bound: float, decay_length: float = 0.0):
    """Transverse cutoff K (internal units) and its certificate.

    ``K^2 = s_cut - s_base`` where ``Ai(s_cut) = bound``: beyond K every mode
    has ``Ai(sigma) < bound`` at the evaluation height. If ``decay_length``
    (a transverse distance) is positive, K is also raised until
    ``exp(-decay_length * sqrt(s_base + K^2)) < bound``.

    Returns
    -------
    K : float
    certificate : dict
        ``sigma_cut``, ``ai_at_cutoff`` and ``bound``.
    """
    s_cut = ai_cutoff_sigma(bound)
    k2 = max(s_cut - s_base, 0.0)
    if decay_length > 0:
        need = (math.log(1.0 / bound) / decay_length) ** 2
        k2 = max(k2, need - s_base)
    kk = math.sqrt(k2) if k2 > 0 else math.sqrt(max(s_cut, 1.0))
    s_at = s_base + kk * kk
    cert = {"sigma_cut": s_at, "ai_at_cutoff": float(specfun.airy_ai(s_at)), "bound": bound}
    return kk, cert


def _green_internal(dy, dz, xi, xi_src, e, lam, k_max, spec, images):
    """4 pi int d^2k/(2pi)^2 sum_images sign e^{i k.d} g, internal units."""
    def f(ky, kz):
        s_add = ky * ky + kz * kz
        g = reduced_green_internal(xi - e + s_add, xi_src - e + s_add, lam)
        acc = 0.0
        for sign, ddy, ddz in images:
            acc = acc + sign * np.exp(1j * (ky * ddy + kz * ddz))
        return acc * g

    res = integrate_kperp_2d(f, k_max, spec.replace(abs_tol=spec.abs_tol / (4 * math.pi)))
    res.value = 4.0 * math.pi * res.value
    res.err_estimate *= 4.0 * math.pi
    return res


def _green_setup(r, r_src, ctx, k_max, spec):
    lg = ctx.length_lg
    r = np.asarray(r.as_array() if isinstance(r, ScreenPoint3D) else r, dtype=float) / lg
    rs = np.asarray(r_src.as_array() if isinstance(r_src, ScreenPoint3D) else r_src, dtype=float) / lg
    if np.all(r == rs):
        raise ValueError("field and source point coincide")
    e = ctx.e_internal
    if k_max is None:
        dx = abs(r[0] - rs[0])
        k_int, _ = kperp_cutoff(max(r[0], rs[0]) - e, spec.kperp_truncation, dx)
    else:
        k_int = k_max * lg
    return r, rs, e, k_int


def green_gravity_halfspace(r, r_src, ctx: GravityContext, k_max: Optional[float] = None,
                            spec: QuadratureSpec = DEFAULT_SPEC, *, return_result: bool = False):
    """Free-space gravitational Green's function as a truncated k_perp integral.

    ``G = 4 pi int d^2k/(2 pi)^2 exp(i k.(x_perp - x_perp')) g(x, x'; k)``.

    Parameters
    ----------
    r, r_src : ScreenPoint3D or array_like (x, y, z)
    k_max : float, optional
        Cutoff in inverse length; chosen from ``spec.kperp_truncation`` and
        the height separation if omitted. The integrand decays like
        ``exp(-|x - x'| k)``, so points at equal height converge slowly.

    Returns
    -------
    complex
        In inverse length units (``1/l_g`` scaling).
    """
    r, rs, e, k_int = _green_setup(r, r_src, ctx, k_max, spec)
    res = _green_internal(r[1] - rs[1], r[2] - rs[2], r[0], rs[0], e, ctx.lam, k_int, spec,
                          [(1.0, r[1] - rs[1], r[2] - rs[2])])
    return _finish_green(res, ctx, return_result)


def green_gravity_corner(r, r_src, ctx: GravityContext, k_max: Optional[float] = None,
                         spec: QuadratureSpec = DEFAULT_SPEC, *, return_result: bool = False):
    """Corner Green's function: the half-space integrand summed over the four
    signed images ``a b exp(i k_y (y - a y') + i k_z (z - b z'))``.

    Vanishes identically when ``y' = 0`` or ``z' = 0`` (and at ``y = 0`` or
    ``z = 0``), since the image phases then cancel pointwise.
    """
    r, rs, e, k_int = _green_setup(r, r_src, ctx, k_max, spec)
    y, z, yp, zp = r[1], r[2], rs[1], rs[2]

    def f(ky, kz):
        s_add = ky * ky + kz * kz
        g = reduced_green_internal(r[0] - e + s_add, rs[0] - e + s_add, ctx.lam)
        # a-sum then b-sum; each difference is exactly zero on a Dirichlet plane
        ya = np.exp(1j * ky * (y - yp)) - np.exp(1j * ky * (y + yp))
        zb = np.exp(1j * kz * (z - zp)) - np.exp(1j * kz * (z + zp))
        return ya * zb * g

    res = integrate_kperp_2d(f, k_int, spec.replace(abs_tol=spec.abs_tol / (4 * math.pi)))
    res.value = 4.0 * math.pi * res.value
    res.err_estimate *= 4.0 * math.pi
    return _finish_green(res, ctx, return_result)


def _finish_green(res, ctx, return_result):
    scale = 1.0 / ctx.length_lg
    res.value = complex(res.value) * scale
    res.err_estimate *= scale
    if not res.converged:
        raise QuadratureError(
            f"k_perp integral did not converge (error {res.err_estimate:.3g})", res)
    return (res.value, res) if return_result else res.value


@dataclass
class PsiGravityResult:
    """Screen wave function on an (x, y) grid and its diagnostics.

    ``psi`` has shape ``(len(x), len(y))``; the remaining arrays are per x.
    """

    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    err_estimate: np.ndarray
    k_max: np.ndarray
    ai_at_cutoff: np.ndarray
    converged: np.ndarray
    evaluations: int = 0


def _slit_weight(ky, y_sl, delta):
    """sin(k y_sl) sin(k delta/2) / k with the removable point at k = 0."""
    small = np.abs(ky) < _KY_SERIES / y_sl
    safe = np.where(small, 1.0, ky)
    w = np.sin(ky * y_sl) * np.sin(ky * delta / 2) / safe
    series = ky * y_sl * delta / 2
    return np.where(small, series, w)


def _kz_integral(s_of_ky, ky, z, lam, a, spec):
    """I(k_y) = int_0^inf k_z sin(k_z z) B(s(k_y) + k_z^2) dk_z for all k_y."""
    base = s_of_ky(ky)

    def f(kz):
        s = base[None, :] + (kz * kz)[:, None]
        b = specfun.airy_corner_bracket(s, lam)
        return (kz * np.sin(kz * z))[:, None] * b

    f = vector_valued(f)
    period = math.pi / z
    nper = int(round(a / period))
    pts = None
    if nper > 1:
        step = max(1, int(math.ceil(nper / (spec.max_subdivisions // 4))))
        pts = [i * period for i in range(step, nper, step)]
    head = integrate_adaptive(f, 0.0, a, spec.replace(max_subdivisions=max(spec.max_subdivisions, 2 * nper + 8)),
                              points=pts)
    tail = integrate_segments(f, lambda n: a + n * period, spec)
    value = np.atleast_1d(head.value) + np.atleast_1d(tail.value)
    err = head.err_estimate + tail.err_estimate
    return value, err, head.evaluations + tail.evaluations, head.converged and tail.converged


def _psi_row(xi, ys, y_sl, delta, z, e, lam, k_max, spec):
    """One screen row at height xi (internal units): vector over ys."""
    s_base = xi - e
    if k_max is None:
        kk, cert = kperp_cutoff(s_base, spec.kperp_truncation, z)
    else:
        kk = float(k_max)
        s_at = s_base + kk * kk
        cert = {"sigma_cut": s_at, "ai_at_cutoff": float(specfun.airy_ai(s_at)),
                "bound": spec.kperp_truncation}
    # tail onset: bracket smooth (sigma >= 2) and amplitude k_z B decreasing
    a2 = max(_TAIL_SIGMA - s_base, s_base + kk * kk, 1.0)
    period = math.pi / z
    a = math.ceil(math.sqrt(a2) / period) * period
    inner_spec = spec.replace(abs_tol=spec.abs_tol / 10, rel_tol=spec.rel_tol / 10)
    stats = {"err": 0.0, "evals": 0, "conv": True}
    ys = np.asarray(ys, dtype=float)

    def outer(ky):
        val, err, nev, conv = _kz_integral(lambda k: s_base + k * k, ky, z, lam, a, inner_spec)
        stats["err"] = max(stats["err"], err)
        stats["evals"] += nev
        stats["conv"] &= conv
        w = _slit_weight(ky, y_sl, delta) * val
        return w[:, None] * np.sin(ky[:, None] * ys[None, :])

    res = integrate_adaptive(vector_valued(outer), 0.0, kk, spec)
    scale = 8.0 / math.pi ** 2
    wmax = min(y_sl, 1.0 / max(kk, 1e-300)) * 1.0
    err = scale * (res.err_estimate + kk * wmax * stats["err"])
    return (scale * np.atleast_1d(res.value), err, kk, cert,
            bool(res.converged and stats["conv"]), res.evaluations + stats["evals"])


def _screen_internal(geometry, ctx):
    lg = ctx.length_lg
    return geometry.y_sl / lg, geometry.delta / lg, geometry.screen_z / lg


def psi_gravity_scan(x_grid, y_grid, geometry: CornerGeometry, ctx: GravityContext,
                     k_max: Optional[float] = None, spec: QuadratureSpec = DEFAULT_SPEC,
                     *, raise_on_failure: bool = True) -> PsiGravityResult:
    """Gravitational screen wave function on an (x, y) grid at ``z = screen_z``.

    By the parity of the integrand the k_perp integral reduces to the first
    quadrant:

        psi = (8 C / pi^2) int_0^K dk_y sin(k_y y_sl) sin(k_y delta/2) sin(k_y y) / k_y
              * int_0^inf dk_z k_z sin(k_z z) B(sigma)

    with B the corner bracket at ``sigma = x - E_tilde(k)/mg`` (internal
    units). The k_y range is cut at K where ``Ai(sigma) < kperp_truncation``
    and the transverse decay ``exp(-z k)`` is below the same bound. The k_z
    integral is not truncated: B decays only like ``pi / sigma``, so its
    oscillatory tail is summed and accelerated.

    Parameters
    ----------
    x_grid, y_grid : array_like
        Heights and transverse screen coordinates (context units).
    k_max : float, optional
        Override of the k_y cutoff (inverse length).

    Returns
    -------
    PsiGravityResult
    """
    xs = np.atleast_1d(np.asarray(x_grid, dtype=float))
    ys = np.atleast_1d(np.asarray(y_grid, dtype=float))
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("grid coordinates must be finite")
    lg = ctx.length_lg
    y_sl, delta, z = _screen_internal(geometry, ctx)
    e = ctx.e_internal
    kmi = None if k_max is None else k_max * lg
    psi = np.empty((len(xs), len(ys)), dtype=complex)
    errs = np.empty(len(xs))
    kms = np.empty(len(xs))
    ais = np.empty(len(xs))
    conv = np.empty(len(xs), dtype=bool)
    evals = 0
    for i, x in enumerate(xs):
        row, err, kk, cert, ok, nev = _psi_row(x / lg, ys / lg, y_sl, delta, z, e, ctx.lam, kmi, spec)
        psi[i] = ctx.amplitude_c * row
        errs[i] = err * abs(ctx.amplitude_c)
        kms[i] = kk / lg
        ais[i] = cert["ai_at_cutoff"]
        conv[i] = ok
        evals += nev
        if raise_on_failure and not ok:
            raise QuadratureError(f"gravitational psi did not converge at x={x!r}")
    return PsiGravityResult(xs, ys, psi, errs, kms, ais, conv, evals)


def psi_gravity(p: ScreenPoint3D, geometry: CornerGeometry, ctx: GravityContext,
                k_max: Optional[float] = None, spec: QuadratureSpec = DEFAULT_SPEC,
                *, return_result: bool = False):
    """Gravitational screen wave function at a single point; see ``psi_gravity_scan``.

    ``p.z`` must equal ``geometry.screen_z``.
    """
    if not math.isclose(p.z, geometry.screen_z, rel_tol=1e-12):
        raise ValueError("psi_gravity evaluates on the screen: p.z must equal geometry.screen_z")
    res = psi_gravity_scan([p.x], [p.y], geometry, ctx, k_max, spec)
    val = complex(res.psi[0, 0])
    return (val, res) if return_result else val
