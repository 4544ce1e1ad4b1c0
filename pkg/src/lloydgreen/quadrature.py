"""Deterministic quadrature engines.

* ``integrate_adaptive``: globally adaptive Gauss-Kronrod (10/21 point)
  bisection for scalar or vector valued integrands.
* ``integrate_oscillatory_tail``: semi-infinite oscillatory integrals summed
  over half periods of the phase, with Wynn epsilon acceleration.
* ``integrate_kperp_2d``: nested integral over a symmetric square in the
  transverse wave vector plane, including the 1/(2 pi)^2 measure.

Integrands are called with 1-d arrays of abscissae and must return an array
of shape ``(n,)`` or ``(n, m)`` (m components integrated together).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import IntegrandError, TailStructureError

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "DEFAULT_SPEC",
    "integrate_adaptive",
    "integrate_segments",
    "integrate_oscillatory_tail",
    "integrate_kperp_2d",
    "wynn_epsilon",
]

# Kronrod 21-point abscissae on [-1, 1] (non-negative half); odd entries are
# the 10-point Gauss nodes.
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
    0.123491976262065851077208844037775,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full 21-node rule, ascending from -1 to 1
_g_half = np.zeros(11)
_g_half[1:10:2] = _WG
NODES = np.concatenate([-_XGK, _XGK[-2::-1]])
K_WEIGHTS = np.concatenate([_WGK, _WGK[-2::-1]])
G_WEIGHTS = np.concatenate([_g_half, _g_half[-2::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budgets for every integral.

    Parameters
    ----------
    abs_tol, rel_tol : float
        Convergence is declared when the error estimate is at most
        ``max(abs_tol, rel_tol * |value|)``.
    max_subdivisions : int
        Panel budget of one adaptive integral (at least 8).
    tail_zero_pairs : int
        Oscillation periods summed before the tail acceleration starts.
    kperp_truncation : float
        Bound on Ai at the transverse wave-vector cutoff.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    tail_zero_pairs: int = 4
    kperp_truncation: float = 1e-12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 8:
            raise ValueError("max_subdivisions must be an integer >= 8")
        if int(self.tail_zero_pairs) != self.tail_zero_pairs or self.tail_zero_pairs < 1:
            raise ValueError("tail_zero_pairs must be a positive integer")
        if not (0 < self.kperp_truncation < 1):
            raise ValueError("kperp_truncation must lie in (0, 1)")

    def tolerance(self, value) -> float:
        return max(self.abs_tol, self.rel_tol * _norm(value))

    def replace(self, **kw) -> "QuadratureSpec":
        d = dict(abs_tol=self.abs_tol, rel_tol=self.rel_tol,
                 max_subdivisions=self.max_subdivisions,
                 tail_zero_pairs=self.tail_zero_pairs,
                 kperp_truncation=self.kperp_truncation)
        d.update(kw)
        return QuadratureSpec(**d)


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class IntegralResult:
    """Value and diagnostics of one integral.

    ``value`` is a scalar for scalar integrands and an array for vector
    valued ones; ``err_estimate`` is a bound on the max-norm error.
    """

    value: object
    err_estimate: float
    evaluations: int
    converged: bool

    def __iter__(self):
        return iter((self.value, self.err_estimate))


def _norm(v) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def _evaluate(f, x):
    y = np.asarray(f(x))
    if y.shape[:1] != x.shape:
        y = np.broadcast_to(y, x.shape + y.shape[1:]) if y.ndim <= 1 else y
    if y.ndim == 1:
        y = y[:, None]
    if not np.all(np.isfinite(y)):
        bad = ~np.all(np.isfinite(y.reshape(len(x), -1)), axis=1)
        xb = float(x[np.argmax(bad)])
        raise IntegrandError(f"non-finite integrand sample at x={xb!r}", xb)
    return y


def _gk21(f, lo, hi):
    """Apply the rule to panels [lo_i, hi_i]; returns K, |K-G| per panel."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = (c[:, None] + h[:, None] * NODES[None, :]).ravel()
    y = _evaluate(f, x).reshape(len(lo), 21, -1)
    k = np.einsum("j,pjm->pm", K_WEIGHTS, y) * h[:, None]
    g = np.einsum("j,pjm->pm", G_WEIGHTS, y) * h[:, None]
    err = np.max(np.abs(k - g), axis=1)
    return k, err


def integrate_adaptive(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC,
                       *, points=None, vectorized: bool = True) -> IntegralResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Integrand. With ``vectorized=True`` it receives a 1-d array and
        returns values of shape ``(n,)`` or ``(n, m)``.
    a, b : float
        Finite limits, ``a < b``.
    points : sequence of float, optional
        Interior breakpoints for the initial panels.

    Returns
    -------
    IntegralResult
        ``converged`` is False when the panel budget ran out; the best
        estimate is still returned.

    Raises
    ------
    IntegrandError
        On a non-finite integrand sample.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"need finite a < b, got [{a}, {b}]")
    if not vectorized:
        g = f
        f = lambda x: np.array([g(float(t)) for t in x])  # noqa: E731
    edges = [a]
    if points is not None:
        edges += sorted(float(p) for p in points if a < p < b)
    edges.append(b)
    lo = np.array(edges[:-1])
    hi = np.array(edges[1:])
    vals, errs = _gk21(f, lo, hi)
    evals = 21 * len(lo)
    budget = int(spec.max_subdivisions)

    while True:
        total = vals.sum(axis=0)
        err = float(errs.sum())
        tol = spec.tolerance(total)
        if err <= tol:
            converged = True
            break
        room = budget - len(lo)
        if room <= 0:
            converged = False
            break
        # split the worst panels, enough to cover the excess error
        order = np.argsort(-errs, kind="stable")
        share = tol / len(lo)
        nsplit = max(1, int(np.count_nonzero(errs > share)))
        nsplit = min(nsplit, room, len(lo))
        pick = np.sort(order[:nsplit])
        keep = np.ones(len(lo), dtype=bool)
        keep[pick] = False
        mid = 0.5 * (lo[pick] + hi[pick])
        if np.any((mid <= lo[pick]) | (mid >= hi[pick])):
            converged = False
            break
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        nv, ne = _gk21(f, new_lo, new_hi)
        evals += 21 * len(new_lo)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        # fixed left-to-right order keeps the accumulation deterministic
        srt = np.argsort(lo, kind="stable")
        lo, hi, vals, errs = lo[srt], hi[srt], vals[srt], errs[srt]

    total = vals.sum(axis=0)
    value = total[0] if _is_scalar_integrand(f, vals) else total
    return IntegralResult(value, float(errs.sum()), evals, converged)


def _is_scalar_integrand(f, vals):
    return vals.shape[1] == 1 and not getattr(f, "_vector_valued", False)


def vector_valued(f):
    """Mark ``f`` so that a single component result is still returned as an array."""
    f._vector_valued = True
    return f


def wynn_epsilon(seq):
    """Wynn epsilon extrapolation of a sequence of partial sums.

    Parameters
    ----------
    seq : array_like, shape (n,) or (n, m)

    Returns
    -------
    scalar or ndarray
        Limit estimate per component: the deepest finite even-column entry.
    """
    s = np.asarray(seq)
    flat = s.ndim == 1
    if flat:
        s = s[:, None]
    n = s.shape[0]
    best = s[-1].copy()
    prev = np.zeros((n + 1,) + s.shape[1:], dtype=s.dtype)
    cur = s.copy()
    alive = np.ones(s.shape[1:], dtype=bool)
    k = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        while cur.shape[0] > 1:
            diff = cur[1:] - cur[:-1]
            nxt = prev[1:cur.shape[0]] + 1.0 / diff
            k += 1
            prev, cur = cur, nxt
            ok = np.all(np.isfinite(cur), axis=0)
            alive &= ok
            if k % 2 == 0:
                best = np.where(alive, cur[-1], best)
            if not alive.any():
                break
    return best[0] if flat else best


def integrate_segments(f: Callable, breakpoint: Callable[[int], float], spec: QuadratureSpec = DEFAULT_SPEC,
                       *, max_segments: int = 400, window: int = 21,
                       segment_check: Optional[Callable[[int, np.ndarray], None]] = None) -> IntegralResult:
    """Integral of ``f`` from ``breakpoint(0)`` to infinity over given segments.

    Segments ``[breakpoint(n), breakpoint(n+1)]`` are integrated one at a
    time and the partial sums extrapolated with the epsilon algorithm.
    Breakpoints should sit at consecutive zeros (half periods) of the
    oscillation so the segment contributions alternate.

    Parameters
    ----------
    f : callable
        Vectorized (possibly vector valued) integrand.
    breakpoint : callable
        ``n -> x_n``, strictly increasing.
    segment_check : callable, optional
        Called with ``(n, segment_value)``; may raise to abort.
    """
    start = 2 * int(spec.tail_zero_pairs)
    seg_spec = spec.replace(abs_tol=spec.abs_tol / 10, rel_tol=spec.rel_tol / 10)
    partial = []
    total = None
    seg_err = 0.0
    evals = 0
    conv = True
    last_est = None
    x0 = breakpoint(0)
    n = 0
    err = math.inf
    est = None
    while n < max_segments:
        x1 = breakpoint(n + 1)
        r = integrate_adaptive(f, x0, x1, seg_spec)
        r.value = np.atleast_1d(r.value)
        evals += r.evaluations
        conv &= r.converged
        seg_err += r.err_estimate
        if segment_check is not None:
            segment_check(n, r.value)
        total = r.value if total is None else total + r.value
        partial.append(total)
        n += 1
        x0 = x1
        if n < start:
            continue
        seq = np.array(partial[-window:])
        if np.all(seq == seq[-1]):
            est, err = seq[-1], 0.0
            break
        est = wynn_epsilon(seq)
        if last_est is not None:
            err = _norm(est - last_est) + seg_err
            if err <= spec.tolerance(est):
                break
        last_est = est
    else:
        conv = False
    if est is None:
        est = total
    return IntegralResult(est, float(err), evals, bool(conv and err <= spec.tolerance(est)))


_WEIGHTS = {
    "exp": (lambda p: np.exp(1j * p), 0.0),
    "sin": (np.sin, 0.0),
    "cos": (np.cos, 0.5 * math.pi),
}


def integrate_oscillatory_tail(amplitude: Callable, phase: Callable, a: float,
                               spec: QuadratureSpec = DEFAULT_SPEC, *, weight: str = "exp",
                               phase_inverse: Optional[Callable] = None,
                               max_segments: int = 400) -> IntegralResult:
    """Integral of ``amplitude(x) * w(phase(x))`` over ``[a, inf)``.

    ``w`` is ``exp(i p)``, ``sin p`` or ``cos p``. The tail is cut at the
    zeros of ``w`` (multiples of pi in phase, offset by pi/2 for cos),
    integrated segment by segment and accelerated.

    Parameters
    ----------
    amplitude : callable
        Vectorized; eventually monotone decaying in magnitude.
    phase : callable
        Vectorized; monotone increasing for ``x >= a``.
    phase_inverse : callable, optional
        Exact inverse of ``phase``; otherwise breakpoints are root-found.

    Raises
    ------
    TailStructureError
        If the amplitude grows between consecutive breakpoints or the phase
        fails to increase.
    """
    if weight not in _WEIGHTS:
        raise ValueError(f"weight must be one of {sorted(_WEIGHTS)}")
    w, offset = _WEIGHTS[weight]
    a = float(a)
    p0 = float(phase(np.array([a]))[0])
    m0 = math.floor((p0 - offset) / math.pi) + 1
    cache = {0: a}

    def solve(target, left):
        g = lambda x: float(phase(np.array([x]))[0]) - target  # noqa: E731
        step = max(abs(left), 1.0) * 0.5
        right = left + step
        for _ in range(200):
            if g(right) >= 0:
                return brentq(g, left, right, xtol=1e-15 * max(1.0, abs(right)), rtol=1e-15)
            left, right = right, right + step
            step *= 2.0
        raise TailStructureError(f"phase never reaches {target:g}; not increasing?")

    def breakpoint(n):
        if n in cache:
            return cache[n]
        target = (m0 + n - 1) * math.pi + offset
        if phase_inverse is not None:
            x = float(phase_inverse(target))
        else:
            x = solve(target, cache[n - 1])
        if not x > cache[n - 1]:
            raise TailStructureError("phase is not increasing along the tail")
        cache[n] = x
        return x

    amp_prev = [None]

    def check(n, _value):
        if n < 1:
            return
        x = breakpoint(n)
        amp = abs(float(np.max(np.abs(amplitude(np.array([x]))))))
        if amp_prev[0] is not None and amp > amp_prev[0] * (1 + 1e-9) + 1e-300:
            raise TailStructureError(f"amplitude not monotone decaying near x={x:g}")
        amp_prev[0] = amp

    f = lambda x: amplitude(x) * w(phase(x))  # noqa: E731
    res = integrate_segments(f, breakpoint, spec, max_segments=max_segments, segment_check=check)
    v = np.asarray(res.value)
    res.value = complex(v[0]) if weight == "exp" else float(np.real(v[0]))
    return res


def integrate_kperp_2d(f: Callable, k_max: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """Integral of ``f(k_y, k_z) / (2 pi)^2`` over ``[-k_max, k_max]^2``.

    The square is folded onto its first quadrant by summing the four sign
    images, so odd parts cancel exactly. The inner k_z integral is computed
    for all outer k_y nodes at once as one vector-valued adaptive integral.

    ``f`` must broadcast over array arguments.
    """
    k_max = float(k_max)
    if not k_max > 0:
        raise ValueError("k_max must be positive")

    def folded(ky, kz):
        return f(ky, kz) + f(-ky, kz) + f(ky, -kz) + f(-ky, -kz)

    inner_spec = spec.replace(abs_tol=spec.abs_tol / (10 * k_max), rel_tol=spec.rel_tol / 10)
    stats = {"evals": 0, "err": 0.0, "conv": True}

    def outer(ky):
        inner = integrate_adaptive(
            vector_valued(lambda kz: folded(ky[None, :], kz[:, None])), 0.0, k_max, inner_spec)
        stats["evals"] += inner.evaluations
        stats["err"] = max(stats["err"], inner.err_estimate)
        stats["conv"] &= inner.converged
        return np.atleast_1d(inner.value)

    res = integrate_adaptive(outer, 0.0, k_max, spec)
    scale = 1.0 / (4.0 * math.pi ** 2)
    value = res.value * scale
    err = (res.err_estimate + k_max * stats["err"]) * scale
    converged = res.converged and stats["conv"] and err <= spec.tolerance(value)
    return IntegralResult(value, err, stats["evals"], bool(converged))
