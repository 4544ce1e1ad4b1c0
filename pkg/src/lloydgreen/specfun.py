"""Special functions: Hankel H0/H1, Airy Ai/Bi, 0F1/1F2 series and the corner bracket.

All functions accept scalars or arrays. A scalar argument gives a scalar
result and an array argument gives an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import AccuracyError, AiryRangeError, DomainError, SeriesConvergenceError

__all__ = [
    "SpecFunAccuracy",
    "DEFAULT_ACCURACY",
    "BI_SIGMA_MAX",
    "AIRY_SIGMA_MIN",
    "HYP_Z_MAX",
    "BRACKET_CLOSED_WINDOW",
    "hankel1",
    "airy",
    "airy_scaled",
    "airy_ai",
    "airy_bi",
    "airy_ai_prime",
    "airy_bi_prime",
    "hyp0f1",
    "hyp1f2",
    "airy_corner_bracket",
    "bracket_cancellation_estimate",
]

#: Largest argument with Bi(s) below the float maximum (Bi(104) ~ 1e305).
BI_SIGMA_MAX = 104.0
#: Most negative accepted Airy argument; the oscillation phase there is ~2e7.
AIRY_SIGMA_MIN = -1.0e5
#: Largest |z| accepted by the hypergeometric series.
HYP_Z_MAX = 1.0e4
#: The closed form of the corner bracket is used inside this window and the
#: non-cancelling integral representation outside of it.
BRACKET_CLOSED_WINDOW = (-6.0, 4.0)
#: Relative error above which a cancellation estimate is rejected.
BRACKET_MAX_ERROR = 1e-6
#: Open interval where the integral representation of the bracket is inaccurate.
BRACKET_INTEGRAL_GAP = (-5.0, 2.5)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpecFunAccuracy:
    """Accuracy settings shared by the special functions.

    Parameters
    ----------
    target_rel_err : float
        Truncation threshold of the power series, relative to the partial sum.
    series_max_terms : int
        Term budget of a single series evaluation.
    asymptotic_switch : float
        Hankel argument above which the asymptotic expansion replaces the
        ascending series. Values far above the default lose accuracy on the
        series side.
    """

    target_rel_err: float = 1e-14
    series_max_terms: int = 500
    asymptotic_switch: float = 12.0

    def __post_init__(self):
        if not (0.0 < self.target_rel_err < 1e-3):
            raise ValueError("target_rel_err must lie in (0, 1e-3)")
        if int(self.series_max_terms) != self.series_max_terms or self.series_max_terms < 1:
            raise ValueError("series_max_terms must be a positive integer")
        if not (self.asymptotic_switch > 0.0 and math.isfinite(self.asymptotic_switch)):
            raise ValueError("asymptotic_switch must be positive")


DEFAULT_ACCURACY = SpecFunAccuracy()


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(value, scalar):
    if scalar:
        v = value.reshape(())[()]
        return complex(v) if np.iscomplexobj(value) else float(v)
    return value


def _check_finite(arr, name):
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")


def hankel1(order: int, x, accuracy: SpecFunAccuracy = DEFAULT_ACCURACY):
    """Hankel function of the first kind, H_n(x) = J_n(x) + i Y_n(x), n in {0, 1}.

    Parameters
    ----------
    order : int
        0 or 1.
    x : float or array_like
        Positive real argument.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    DomainError
        If ``x <= 0`` (typically a field point on the source plane) or the
        order is unsupported.

    Notes
    -----
    Relative accuracy is about 1e-11 near the series/asymptotic switch and
    better elsewhere.
    """
    if order not in (0, 1):
        raise DomainError(f"hankel1 supports orders 0 and 1, got {order!r}")
    arr, scalar = _as_array(x)
    _check_finite(arr, "x")
    if np.any(arr <= 0.0):
        raise DomainError("hankel1 requires x > 0 (field point on the z = 0 plane?)")
    h0, h1 = kernels.hankel01(arr.ravel(), accuracy.asymptotic_switch)
    h = (h0 if order == 0 else h1).reshape(arr.shape)
    return _out(h, scalar)


def _check_airy(arr, need_bi):
    _check_finite(arr, "sigma")
    if np.any(arr < AIRY_SIGMA_MIN):
        raise AiryRangeError(
            f"Airy argument below {AIRY_SIGMA_MIN:g} is outside the supported range",
            AIRY_SIGMA_MIN)
    if need_bi and np.any(arr > BI_SIGMA_MAX):
        raise AiryRangeError(
            f"Bi overflows for sigma > {BI_SIGMA_MAX:g}", BI_SIGMA_MAX)


def airy(sigma):
    """Return ``(Ai, Ai', Bi, Bi')`` at real ``sigma``.

    Raises
    ------
    AiryRangeError
        For ``sigma > BI_SIGMA_MAX`` (Bi overflow) or ``sigma < AIRY_SIGMA_MIN``.
    """
    arr, scalar = _as_array(sigma)
    _check_airy(arr, True)
    vals = kernels.airy(arr.ravel())
    return tuple(_out(v.reshape(arr.shape), scalar) for v in vals)


def airy_scaled(sigma):
    """Exponentially scaled Airy functions.

    For ``sigma > 0`` returns ``Ai*e^z, Ai'*e^z, Bi*e^-z, Bi'*e^-z`` with
    ``z = 2/3 sigma^1.5``; unscaled values for ``sigma <= 0``. No overflow
    bound applies.
    """
    arr, scalar = _as_array(sigma)
    _check_airy(arr, False)
    vals = kernels.airy_scaled(arr.ravel())
    return tuple(_out(v.reshape(arr.shape), scalar) for v in vals)


def _airy_component(sigma, idx, need_bi):
    arr, scalar = _as_array(sigma)
    _check_airy(arr, need_bi)
    return _out(kernels.airy(arr.ravel())[idx].reshape(arr.shape), scalar)


def airy_ai(sigma):
    """Airy function Ai. Underflows to 0 for large positive sigma."""
    return _airy_component(sigma, 0, False)


def airy_ai_prime(sigma):
    """Derivative Ai'."""
    return _airy_component(sigma, 1, False)


def airy_bi(sigma):
    """Airy function Bi. Raises AiryRangeError above BI_SIGMA_MAX."""
    return _airy_component(sigma, 2, True)


def airy_bi_prime(sigma):
    """Derivative Bi'. Raises AiryRangeError above BI_SIGMA_MAX."""
    return _airy_component(sigma, 3, True)


def _check_param(p, name):
    if not math.isfinite(p):
        raise DomainError(f"{name} must be finite")
    if p <= 0 and float(p).is_integer():
        raise DomainError(f"{name} = {p} is a non-positive integer; the series is undefined")


def _series_result(res, scalar, accuracy):
    value, last, conv = res
    if not np.all(conv):
        worst = float(np.max(np.where(conv, 0.0, last)))
        raise SeriesConvergenceError(
            f"series did not converge within {accuracy.series_max_terms} terms", worst)
    return _out(value, scalar)


def _check_z(arr):
    _check_finite(arr, "z")
    if np.any(np.abs(arr) > HYP_Z_MAX):
        raise DomainError(f"|z| > {HYP_Z_MAX:g} exceeds the series budget")


def hyp0f1(b: float, z, accuracy: SpecFunAccuracy = DEFAULT_ACCURACY):
    """Confluent limit function 0F1(;b;z) by direct series summation.

    The sum stops after three consecutive terms below
    ``target_rel_err * |partial sum|``.
    """
    _check_param(b, "b")
    arr, scalar = _as_array(z)
    _check_z(arr)
    res = kernels.hyp0f1(float(b), arr.ravel(), accuracy.target_rel_err,
                         int(accuracy.series_max_terms))
    return _series_result(tuple(r.reshape(arr.shape) for r in res), scalar, accuracy)


def hyp1f2(a: float, b1: float, b2: float, z, accuracy: SpecFunAccuracy = DEFAULT_ACCURACY):
    """Generalized hypergeometric 1F2(a;b1,b2;z) by direct series summation."""
    if not math.isfinite(a):
        raise DomainError("a must be finite")
    _check_param(b1, "b1")
    _check_param(b2, "b2")
    arr, scalar = _as_array(z)
    _check_z(arr)
    res = kernels.hyp1f2(float(a), float(b1), float(b2), arr.ravel(),
                         accuracy.target_rel_err, int(accuracy.series_max_terms))
    return _series_result(tuple(r.reshape(arr.shape) for r in res), scalar, accuracy)


def _closed_bracket(s, accuracy):
    """Closed-form lambda-free bracket and its relative error estimate."""
    tol, nmax = accuracy.target_rel_err, int(accuracy.series_max_terms)
    value, last, conv = kernels.bracket0_closed(s, tol, nmax)
    if not np.all(conv):
        worst = float(np.max(np.where(conv, 0.0, last)))
        raise SeriesConvergenceError("corner bracket series did not converge", worst)
    # sum of absolute terms: the same series at |z|
    z = np.abs(s) ** 3 / 9.0
    f1 = kernels.hyp0f1(2.0 / 3.0, z, tol, nmax)[0]
    g1 = kernels.hyp1f2(2.0 / 3.0, 4.0 / 3.0, 5.0 / 3.0, z, tol, nmax)[0]
    f2 = kernels.hyp0f1(4.0 / 3.0, z, tol, nmax)[0]
    g2 = kernels.hyp1f2(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, z, tol, nmax)[0]
    ai, _, bi, _ = kernels.airy(s)
    magnitude = math.pi / 3.0 * np.abs(bi) + 0.5 * s * s * (f1 * g1 + 2.0 * f2 * g2)
    scale = np.where(s >= 0, np.abs(value),
                     np.maximum(np.abs(value), math.pi * np.hypot(ai, bi)))
    scale = np.maximum(scale, np.finfo(float).tiny)
    estimate = (8.0 * _EPS * magnitude + 4.0 * last * magnitude) / scale
    return value, estimate


def bracket_cancellation_estimate(sigma, accuracy: SpecFunAccuracy = DEFAULT_ACCURACY):
    """Relative rounding-error estimate of the closed-form bracket at ``sigma``.

    The estimate is the ratio of the summed term magnitudes (times a few
    ulps) to the size of the result. It grows like ``exp(4/3 sigma^1.5)``
    for positive sigma.
    """
    arr, scalar = _as_array(sigma)
    _check_airy(arr, True)
    _, est = _closed_bracket(arr.ravel(), accuracy)
    return _out(est.reshape(arr.shape), scalar)


def airy_corner_bracket(sigma, lam=0.0, accuracy: SpecFunAccuracy = DEFAULT_ACCURACY,
                        path: str = "auto"):
    """Corner bracket lam*Ai(s) + (pi/3)Bi(s) + (s^2/2)[0F1 1F2 - 2 0F1 1F2].

    The hypergeometric factors are 0F1(;2/3;s^3/9) 1F2(2/3;4/3,5/3;s^3/9)
    and 0F1(;4/3;s^3/9) 1F2(1/3;2/3,4/3;s^3/9).

    Parameters
    ----------
    sigma : float or array_like
        Dimensionless height.
    lam : complex, optional
        Coefficient of the homogeneous Ai admixture.
    path : {"auto", "closed", "integral"}
        ``auto`` uses the closed form inside ``BRACKET_CLOSED_WINDOW`` and an
        integral representation of the lambda-free part outside it, where
        the closed form cancels catastrophically.

    Returns
    -------
    float or complex (array for array input)
        Complex if ``lam`` is complex, real otherwise.

    Raises
    ------
    AccuracyError
        If the closed form is requested where its cancellation estimate
        exceeds 1e-6, or the integral form inside ``BRACKET_INTEGRAL_GAP``.

    Notes
    -----
    The lambda-free part equals pi*Gi(s), with Gi the Scorer function. It
    decays like pi/s for large positive s and oscillates for negative s.
    """
    if path not in ("auto", "closed", "integral"):
        raise ValueError(f"unknown path {path!r}")
    arr, scalar = _as_array(sigma)
    _check_finite(arr, "sigma")
    if np.any(arr < AIRY_SIGMA_MIN):
        raise AiryRangeError("sigma below the supported Airy range", AIRY_SIGMA_MIN)
    s = arr.ravel()
    lo, hi = BRACKET_CLOSED_WINDOW
    if path == "closed":
        closed = np.ones(s.shape, dtype=bool)
    elif path == "integral":
        closed = np.zeros(s.shape, dtype=bool)
    else:
        closed = (s >= lo) & (s <= hi)

    base = np.empty_like(s)
    if closed.any():
        sc = s[closed]
        if np.any(sc > BI_SIGMA_MAX):
            raise AiryRangeError(f"closed form needs Bi(sigma), sigma <= {BI_SIGMA_MAX:g}",
                                 BI_SIGMA_MAX)
        value, est = _closed_bracket(sc, accuracy)
        bad = est > BRACKET_MAX_ERROR
        if np.any(bad):
            i = int(np.argmax(est))
            raise AccuracyError(
                f"closed-form corner bracket loses accuracy at sigma={sc[i]:g} "
                f"(estimated relative error {est[i]:.2e})", float(est[i]))
        base[closed] = value
    if (~closed).any():
        si = s[~closed]
        glo, ghi = BRACKET_INTEGRAL_GAP
        inside = (si > glo) & (si < ghi)
        if np.any(inside):
            raise AccuracyError(
                f"integral corner bracket is only accurate for sigma <= {glo:g} or "
                f"sigma >= {ghi:g}, got {si[inside][0]:g}", math.inf)
        base[~closed] = kernels.bracket0_integral(si)

    lam_c = complex(lam)
    if lam_c == 0:
        result = base if not np.iscomplexobj(lam) else base.astype(complex)
    else:
        ai = kernels.airy(s)[0]
        if lam_c.imag == 0 and not np.iscomplexobj(lam):
            result = lam_c.real * ai + base
        else:
            result = lam_c * ai + base
    return _out(result.reshape(arr.shape), scalar)
