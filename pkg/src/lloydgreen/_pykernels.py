"""Pure numpy fallback for the special-function kernels.

Mirrors ``_ckernels.pyx`` algorithm for algorithm; every function takes and
returns float64 / complex128 arrays.  Used when the compiled extension is not
built, or when ``LLOYDGREEN_BACKEND=python`` is set.
"""

import math

import numpy as np

NAME = "python"

EULER_GAMMA = 0.57721566490153286061

AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))
BI0 = 1.0 / (3.0 ** (1.0 / 6.0) * math.gamma(2.0 / 3.0))
BIP0 = 3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0)

AIRY_ASYMPTOTIC = 9.0
HANKEL_SWITCH = 12.0
_STEP_TERMS = 40
_ASYM_TERMS = 60


def _uv_coefficients(n):
    u = np.empty(n)
    v = np.empty(n)
    u[0] = 1.0
    v[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -u[k] * (6 * k + 1) / (6 * k - 1)
    return u, v


_U, _V = _uv_coefficients(_ASYM_TERMS)


def _taylor_step(s0, f, fp, h, nterms=_STEP_TERMS):
    """Continue a solution of f'' = s f from s0 to s0 + h by its Taylor series."""
    c_prev2 = np.zeros_like(f)
    c_prev = f
    c_cur = fp
    val = f + fp * h
    der = fp.copy()
    hp = h.copy()  # h**(n-1) for the derivative sum
    for n in range(0, nterms):
        # c_{n+2} from c_n and c_{n-1}
        c_next = (s0 * c_prev + c_prev2) / ((n + 2.0) * (n + 1.0))
        hp_next = hp * h
        der = der + (n + 2.0) * c_next * hp
        val = val + c_next * hp_next
        hp = hp_next
        c_prev2, c_prev, c_cur = c_prev, c_cur, c_next
    return val, der


def _asym_positive(x):
    """Ai, Ai', Bi, Bi' for x >= AIRY_ASYMPTOTIC, exponentially scaled.

    Ai, Ai' carry a factor exp(zeta), Bi, Bi' a factor exp(-zeta).
    """
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    q = x ** 0.25
    sa = np.zeros_like(x)
    sap = np.zeros_like(x)
    sb = np.zeros_like(x)
    sbp = np.zeros_like(x)
    inv = 1.0 / zeta
    p = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    for k in range(_ASYM_TERMS):
        tu = _U[k] * p
        tv = _V[k] * p
        sign = -1.0 if k % 2 else 1.0
        live = ~done
        sa = np.where(live, sa + sign * tu, sa)
        sap = np.where(live, sap + sign * tv, sap)
        sb = np.where(live, sb + tu, sb)
        sbp = np.where(live, sbp + tv, sbp)
        done |= np.abs(tu) < 1e-17
        if done.all():
            break
        p = p * inv
    rpi = 1.0 / math.sqrt(math.pi)
    ai = 0.5 * rpi / q * sa
    aip = -0.5 * rpi * q * sap
    bi = rpi / q * sb
    bip = rpi * q * sbp
    return ai, aip, bi, bip, zeta


def _asym_negative(x):
    """Ai(-x), Ai'(-x), Bi(-x), Bi'(-x) for x >= AIRY_ASYMPTOTIC."""
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    q = x ** 0.25
    inv = 1.0 / zeta
    pu_e = np.zeros_like(x)
    pu_o = np.zeros_like(x)
    pv_e = np.zeros_like(x)
    pv_o = np.zeros_like(x)
    p = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    for k in range(_ASYM_TERMS):
        tu = _U[k] * p
        tv = _V[k] * p
        sign = -1.0 if (k // 2) % 2 else 1.0
        live = ~done
        if k % 2 == 0:
            pu_e = np.where(live, pu_e + sign * tu, pu_e)
            pv_e = np.where(live, pv_e + sign * tv, pv_e)
        else:
            pu_o = np.where(live, pu_o + sign * tu, pu_o)
            pv_o = np.where(live, pv_o + sign * tv, pv_o)
        done |= np.abs(tu) < 1e-17
        if done.all():
            break
        p = p * inv
    phase = zeta - math.pi / 4.0
    c = np.cos(phase)
    s = np.sin(phase)
    rpi = 1.0 / math.sqrt(math.pi)
    ai = rpi / q * (c * pu_e + s * pu_o)
    aip = rpi * q * (s * pv_e - c * pv_o)
    bi = rpi / q * (-s * pu_e + c * pu_o)
    bip = rpi * q * (c * pv_e + s * pv_o)
    return ai, aip, bi, bip


def _build_anchors():
    n = int(AIRY_ASYMPTOTIC)
    size = 2 * n + 1
    table = np.zeros((size, 4))  # rows indexed by anchor + n
    table[n] = (AI0, AIP0, BI0, BIP0)
    one = np.ones(1)
    # negative side: oscillatory, stable in both directions
    for k in range(0, n):
        s0 = -float(k)
        row = table[n - k]
        ai, aip = _taylor_step(s0, row[0:1], row[1:2], -one)
        bi, bip = _taylor_step(s0, row[2:3], row[3:4], -one)
        table[n - k - 1] = (ai[0], aip[0], bi[0], bip[0])
    # positive side: Bi forward (dominant), Ai backward from the asymptotic end
    for k in range(0, n):
        s0 = float(k)
        row = table[n + k]
        bi, bip = _taylor_step(s0, row[2:3], row[3:4], one)
        table[n + k + 1, 2:4] = (bi[0], bip[0])
    ai, aip, _, _, zeta = _asym_positive(np.array([AIRY_ASYMPTOTIC]))
    scale = math.exp(-zeta[0])
    table[2 * n, 0:2] = (ai[0] * scale, aip[0] * scale)
    for k in range(n, 1, -1):
        ai, aip = _taylor_step(float(k), table[n + k, 0:1], table[n + k, 1:2], -one)
        table[n + k - 1, 0:2] = (ai[0], aip[0])
    return table


_ANCHORS = _build_anchors()


def _airy_core(s, scaled):
    s = np.asarray(s, dtype=float)
    ai = np.empty_like(s)
    aip = np.empty_like(s)
    bi = np.empty_like(s)
    bip = np.empty_like(s)
    a = AIRY_ASYMPTOTIC

    mid = np.abs(s) < a
    if mid.any():
        sm = s[mid]
        k = np.rint(sm)
        h = sm - k
        rows = _ANCHORS[(k + a).astype(int)]
        r_ai, r_aip = _taylor_step(k, rows[:, 0], rows[:, 1], h)
        r_bi, r_bip = _taylor_step(k, rows[:, 2], rows[:, 3], h)
        if scaled:
            zeta = np.where(sm > 0, 2.0 / 3.0 * np.abs(sm) ** 1.5, 0.0)
            up = np.exp(zeta)
            down = np.exp(-zeta)
            r_ai, r_aip, r_bi, r_bip = r_ai * up, r_aip * up, r_bi * down, r_bip * down
        ai[mid], aip[mid], bi[mid], bip[mid] = r_ai, r_aip, r_bi, r_bip

    pos = s >= a
    if pos.any():
        r_ai, r_aip, r_bi, r_bip, zeta = _asym_positive(s[pos])
        if not scaled:
            with np.errstate(over="ignore"):
                up = np.exp(zeta)
            down = np.exp(-zeta)
            r_ai, r_aip = r_ai * down, r_aip * down
            with np.errstate(invalid="ignore"):
                r_bi, r_bip = r_bi * up, r_bip * up
        ai[pos], aip[pos], bi[pos], bip[pos] = r_ai, r_aip, r_bi, r_bip

    neg = s <= -a
    if neg.any():
        ai[neg], aip[neg], bi[neg], bip[neg] = _asym_negative(-s[neg])

    bad = ~np.isfinite(s)
    if bad.any():
        ai[bad] = aip[bad] = bi[bad] = bip[bad] = np.nan
    return ai, aip, bi, bip


def airy(s):
    """Ai, Ai', Bi, Bi' at real arguments."""
    return _airy_core(s, False)


def airy_scaled(s):
    """Airy functions with Ai, Ai' times exp(zeta) and Bi, Bi' times exp(-zeta) for s > 0."""
    return _airy_core(s, True)


def hankel01(x, switch=HANKEL_SWITCH):
    """H0^(1)(x), H1^(1)(x) for x > 0; ascending series below ``switch``."""
    x = np.asarray(x, dtype=float)
    h0 = np.empty(x.shape, dtype=complex)
    h1 = np.empty(x.shape, dtype=complex)
    small = x < switch
    if small.any():
        xs = x[small]
        q = 0.25 * xs * xs
        t0 = np.ones_like(xs)  # (-q)^k / (k!)^2
        t1 = np.ones_like(xs)  # (-q)^k / (k! (k+1)!)
        j0 = t0.copy()
        j1s = t1.copy()
        y0s = np.zeros_like(xs)
        psi_k1 = -EULER_GAMMA  # digamma(k+1)
        psi_k2 = 1.0 - EULER_GAMMA  # digamma(k+2)
        y1s = (psi_k1 + psi_k2) * t1
        harmonic = 0.0
        for k in range(1, 60):
            t0 = -t0 * q / (k * k)
            t1 = -t1 * q / (k * (k + 1.0))
            harmonic += 1.0 / k
            psi_k1 = psi_k2
            psi_k2 = psi_k2 + 1.0 / (k + 1.0)
            j0 = j0 + t0
            j1s = j1s + t1
            y0s = y0s - harmonic * t0
            y1s = y1s + (psi_k1 + psi_k2) * t1
            if np.all((np.abs(t0) + np.abs(t1)) * (1.0 + harmonic) < 1e-18):
                break
        half = 0.5 * xs
        lg = np.log(half)
        j1 = half * j1s
        y0 = (2.0 / math.pi) * ((lg + EULER_GAMMA) * j0 + y0s)
        y1 = (2.0 / math.pi) * lg * j1 - 2.0 / (math.pi * xs) - half * y1s / math.pi
        h0[small] = j0 + 1j * y0
        h1[small] = j1 + 1j * y1
    big = ~small
    if big.any():
        xb = x[big]
        for nu, out in ((0, h0), (1, h1)):
            mu = 4.0 * nu * nu
            s = np.ones(xb.shape, dtype=complex)
            term = np.ones(xb.shape, dtype=complex)
            prev = np.full(xb.shape, np.inf)
            live = np.ones(xb.shape, dtype=bool)
            for k in range(1, 60):
                term = term * 1j * (mu - (2 * k - 1) ** 2) / (k * 8.0 * xb)
                mag = np.abs(term)
                live &= (mag < prev) & (prev > 1e-17)
                s = np.where(live, s + term, s)
                prev = np.where(live, mag, prev)
                if not live.any():
                    break
            phase = xb - (0.5 * nu + 0.25) * math.pi
            out[big] = np.sqrt(2.0 / (math.pi * xb)) * (np.cos(phase) + 1j * np.sin(phase)) * s
    return h0, h1


def _pfq_series(ratio, z, tol, max_terms):
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    term = np.ones_like(z)
    quiet = np.zeros(z.shape, dtype=int)
    done = np.zeros(z.shape, dtype=bool)
    n = 0
    while n < max_terms:
        term = np.where(done, term, term * ratio(n) * z)
        total = np.where(done, total, total + term)
        small = np.abs(term) <= tol * np.abs(total)
        quiet = np.where(small, quiet + 1, 0)
        done |= quiet >= 3
        n += 1
        if done.all():
            break
    return total, np.abs(term), done


def hyp0f1(b, z, tol, max_terms):
    return _pfq_series(lambda n: 1.0 / ((b + n) * (n + 1.0)), z, tol, max_terms)


def hyp1f2(a, b1, b2, z, tol, max_terms):
    return _pfq_series(lambda n: (a + n) / ((b1 + n) * (b2 + n) * (n + 1.0)), z, tol, max_terms)


def bracket0_closed(s, tol, max_terms):
    """(pi/3) Bi + (s^2/2)[0F1 1F2 - 2 0F1 1F2] at argument s**3/9.

    Returns value, worst last-term magnitude and convergence flag.
    """
    s = np.asarray(s, dtype=float)
    z = s ** 3 / 9.0
    f1, e1, c1 = hyp0f1(2.0 / 3.0, z, tol, max_terms)
    g1, e2, c2 = hyp1f2(2.0 / 3.0, 4.0 / 3.0, 5.0 / 3.0, z, tol, max_terms)
    f2, e3, c3 = hyp0f1(4.0 / 3.0, z, tol, max_terms)
    g2, e4, c4 = hyp1f2(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, z, tol, max_terms)
    _, _, bi, _ = airy(s)
    value = math.pi / 3.0 * bi + 0.5 * s * s * (f1 * g1 - 2.0 * f2 * g2)
    last = np.maximum(np.maximum(e1, e2), np.maximum(e3, e4))
    return value, last, c1 & c2 & c3 & c4


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)
_PANEL_EDGES = np.linspace(0.0, 40.0, 21)
_GI_NODES = ((_PANEL_EDGES[:-1, None] + _PANEL_EDGES[1:, None]) / 2
             + (_PANEL_EDGES[1:, None] - _PANEL_EDGES[:-1, None]) / 2 * _GL_X).ravel()
_GI_WEIGHTS = ((_PANEL_EDGES[1:, None] - _PANEL_EDGES[:-1, None]) / 2 * _GL_W).ravel()
_GI_BASE = _GI_WEIGHTS * np.exp(-_GI_NODES) * np.sin(math.sqrt(3.0) * _GI_NODES + math.pi / 6.0)
_LAG_X, _LAG_W = np.polynomial.laguerre.laggauss(48)


GI_SERIES = 20.0


def _gi_large(x):
    # pi*Gi(x) ~ (1/x) sum (3k)! / (k! (3x^3)^k), convergent to rounding for x >= 20
    total = np.ones_like(x)
    term = np.ones_like(x)
    w = 1.0 / (3.0 * x ** 3)
    for k in range(1, 30):
        term = term * (3 * k - 2) * (3 * k - 1) * (3 * k) / k * w
        total = total + term
        if np.all(term < 1e-17):
            break
    return total / x


def bracket0_integral(s):
    """pi * Gi(s) from non-cancelling integral representations.

    s >= 20: the convergent-to-rounding asymptotic series of that integral.
    0 < s < 20: rotated-contour Laplace integral of Gi.
    s <= 0: pi * (Bi(s) - Hi(s)) with Hi as a monotone Laplace integral.
    Accurate for s >= 2.5 and s <= -5.
    """
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    far = s >= GI_SERIES
    if far.any():
        out[far] = _gi_large(s[far])
    pos = (s > 0) & ~far
    if pos.any():
        sp = s[pos][:, None]
        v = _GI_NODES[None, :]
        out[pos] = 2.0 / s[pos] * (np.exp(-8.0 * v ** 3 / (3.0 * sp ** 3)) @ _GI_BASE)
    neg = s <= 0
    if neg.any():
        a = -s[neg]
        safe = np.where(a > 0, a, 1.0)
        hi = (np.exp(-_LAG_X[None, :] ** 3 / (3.0 * safe[:, None] ** 3)) @ _LAG_W) / safe
        _, _, bi, _ = airy(s[neg])
        out[neg] = math.pi * bi - hi
    return out
