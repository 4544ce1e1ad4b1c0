# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled special-function kernels.

Scalar C loops over the same algorithms as ``_pykernels``; array in, array out.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, log, cos, sin, fabs, pow, tgamma, isfinite, NAN, M_PI, round

cnp.import_array()

NAME = "cython"

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double AIRY_ASYM = 9.0
cdef double HANKEL_SWITCH = 12.0
cdef int STEP_TERMS = 40
cdef int ASYM_TERMS = 60
DEF NANCHOR = 19

cdef double AI0, AIP0, BI0, BIP0
AI0 = 1.0 / (pow(3.0, 2.0 / 3.0) * tgamma(2.0 / 3.0))
AIP0 = -1.0 / (pow(3.0, 1.0 / 3.0) * tgamma(1.0 / 3.0))
BI0 = 1.0 / (pow(3.0, 1.0 / 6.0) * tgamma(2.0 / 3.0))
BIP0 = pow(3.0, 1.0 / 6.0) / tgamma(1.0 / 3.0)

cdef double U[60]
cdef double V[60]
cdef double ANCH[NANCHOR][4]


cdef void _init_uv():
    cdef int k
    U[0] = 1.0
    V[0] = 1.0
    for k in range(1, ASYM_TERMS):
        U[k] = U[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        V[k] = -U[k] * (6 * k + 1) / (6 * k - 1)


cdef inline void _taylor_step(double s0, double f, double fp, double h,
                              double *val, double *der) nogil:
    cdef double c_prev2 = 0.0, c_prev = f, c_cur = fp, c_next
    cdef double v = f + fp * h, d = fp, hp = h, hp_next
    cdef int n
    for n in range(STEP_TERMS):
        c_next = (s0 * c_prev + c_prev2) / ((n + 2.0) * (n + 1.0))
        hp_next = hp * h
        d = d + (n + 2.0) * c_next * hp
        v = v + c_next * hp_next
        hp = hp_next
        c_prev2 = c_prev
        c_prev = c_cur
        c_cur = c_next
    val[0] = v
    der[0] = d


cdef inline void _asym_positive(double x, double *ai, double *aip,
                                double *bi, double *bip, double *zeta) nogil:
    # exponentially scaled: Ai*exp(zeta), Bi*exp(-zeta)
    cdef double z = 2.0 / 3.0 * x * sqrt(x)
    cdef double q = pow(x, 0.25)
    cdef double inv = 1.0 / z, p = 1.0
    cdef double sa = 0.0, sap = 0.0, sb = 0.0, sbp = 0.0, tu, tv, sign
    cdef int k
    for k in range(ASYM_TERMS):
        tu = U[k] * p
        tv = V[k] * p
        sign = -1.0 if k % 2 else 1.0
        sa += sign * tu
        sap += sign * tv
        sb += tu
        sbp += tv
        if fabs(tu) < 1e-17:
            break
        p *= inv
    cdef double rpi = 1.0 / sqrt(M_PI)
    ai[0] = 0.5 * rpi / q * sa
    aip[0] = -0.5 * rpi * q * sap
    bi[0] = rpi / q * sb
    bip[0] = rpi * q * sbp
    zeta[0] = z


cdef inline void _asym_negative(double x, double *ai, double *aip,
                                double *bi, double *bip) nogil:
    cdef double z = 2.0 / 3.0 * x * sqrt(x)
    cdef double q = pow(x, 0.25)
    cdef double inv = 1.0 / z, p = 1.0
    cdef double pu_e = 0.0, pu_o = 0.0, pv_e = 0.0, pv_o = 0.0, tu, tv, sign
    cdef int k
    for k in range(ASYM_TERMS):
        tu = U[k] * p
        tv = V[k] * p
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            pu_e += sign * tu
            pv_e += sign * tv
        else:
            pu_o += sign * tu
            pv_o += sign * tv
        if fabs(tu) < 1e-17:
            break
        p *= inv
    cdef double phase = z - M_PI / 4.0
    cdef double c = cos(phase), s = sin(phase)
    cdef double rpi = 1.0 / sqrt(M_PI)
    ai[0] = rpi / q * (c * pu_e + s * pu_o)
    aip[0] = rpi * q * (s * pv_e - c * pv_o)
    bi[0] = rpi / q * (-s * pu_e + c * pu_o)
    bip[0] = rpi * q * (c * pv_e + s * pv_o)


cdef void _init_anchors():
    cdef int n = 9, k
    cdef double a, ap, b, bp, z
    ANCH[n][0] = AI0
    ANCH[n][1] = AIP0
    ANCH[n][2] = BI0
    ANCH[n][3] = BIP0
    for k in range(n):
        _taylor_step(-k, ANCH[n - k][0], ANCH[n - k][1], -1.0, &a, &ap)
        _taylor_step(-k, ANCH[n - k][2], ANCH[n - k][3], -1.0, &b, &bp)
        ANCH[n - k - 1][0] = a
        ANCH[n - k - 1][1] = ap
        ANCH[n - k - 1][2] = b
        ANCH[n - k - 1][3] = bp
    for k in range(n):
        _taylor_step(k, ANCH[n + k][2], ANCH[n + k][3], 1.0, &b, &bp)
        ANCH[n + k + 1][2] = b
        ANCH[n + k + 1][3] = bp
    _asym_positive(AIRY_ASYM, &a, &ap, &b, &bp, &z)
    ANCH[2 * n][0] = a * exp(-z)
    ANCH[2 * n][1] = ap * exp(-z)
    for k in range(n, 1, -1):
        _taylor_step(k, ANCH[n + k][0], ANCH[n + k][1], -1.0, &a, &ap)
        ANCH[n + k - 1][0] = a
        ANCH[n + k - 1][1] = ap


_init_uv()
_init_anchors()


cdef inline void _airy1(double s, bint scaled, double *ai, double *aip,
                        double *bi, double *bip) nogil:
    cdef double k, h, z, up, down
    cdef int row
    if not isfinite(s):
        ai[0] = NAN
        aip[0] = NAN
        bi[0] = NAN
        bip[0] = NAN
        return
    if fabs(s) < AIRY_ASYM:
        k = round(s)
        h = s - k
        row = <int>(k + AIRY_ASYM)
        _taylor_step(k, ANCH[row][0], ANCH[row][1], h, ai, aip)
        _taylor_step(k, ANCH[row][2], ANCH[row][3], h, bi, bip)
        if scaled and s > 0:
            z = 2.0 / 3.0 * s * sqrt(s)
            up = exp(z)
            down = exp(-z)
            ai[0] *= up
            aip[0] *= up
            bi[0] *= down
            bip[0] *= down
    elif s >= AIRY_ASYM:
        _asym_positive(s, ai, aip, bi, bip, &z)
        if not scaled:
            up = exp(z)
            down = exp(-z)
            ai[0] *= down
            aip[0] *= down
            bi[0] *= up
            bip[0] *= up
    else:
        _asym_negative(-s, ai, aip, bi, bip)


def _airy_core(s, bint scaled):
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64).ravel()
    cdef Py_ssize_t n = sv.shape[0], i
    shape = np.shape(s)
    out = np.empty((4, n))
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(n):
            _airy1(sv[i], scaled, &o[0, i], &o[1, i], &o[2, i], &o[3, i])
    return tuple(out[j].reshape(shape) for j in range(4))


def airy(s):
    """Ai, Ai', Bi, Bi' at real arguments."""
    return _airy_core(s, False)


def airy_scaled(s):
    """Airy functions with Ai, Ai' times exp(zeta) and Bi, Bi' times exp(-zeta) for s > 0."""
    return _airy_core(s, True)


cdef inline void _hankel1(double x, double switch, double complex *h0, double complex *h1) nogil:
    cdef double q, t0, t1, j0, j1s, y0s, y1s, psi1, psi2, harmonic, half, lg, j1, y0, y1
    cdef double mu, mag, prev, phase, amp
    cdef double complex s, term
    cdef int k, nu
    if x < switch:
        q = 0.25 * x * x
        t0 = 1.0
        t1 = 1.0
        j0 = 1.0
        j1s = 1.0
        y0s = 0.0
        psi1 = -EULER_GAMMA
        psi2 = 1.0 - EULER_GAMMA
        y1s = (psi1 + psi2) * t1
        harmonic = 0.0
        for k in range(1, 60):
            t0 = -t0 * q / (k * k)
            t1 = -t1 * q / (k * (k + 1.0))
            harmonic += 1.0 / k
            psi1 = psi2
            psi2 = psi2 + 1.0 / (k + 1.0)
            j0 += t0
            j1s += t1
            y0s -= harmonic * t0
            y1s += (psi1 + psi2) * t1
            if (fabs(t0) + fabs(t1)) * (1.0 + harmonic) < 1e-18:
                break
        half = 0.5 * x
        lg = log(half)
        j1 = half * j1s
        y0 = (2.0 / M_PI) * ((lg + EULER_GAMMA) * j0 + y0s)
        y1 = (2.0 / M_PI) * lg * j1 - 2.0 / (M_PI * x) - half * y1s / M_PI
        h0[0] = j0 + 1j * y0
        h1[0] = j1 + 1j * y1
        return
    amp = sqrt(2.0 / (M_PI * x))
    for nu in range(2):
        mu = 4.0 * nu * nu
        s = 1.0
        term = 1.0
        prev = 1e300
        for k in range(1, 60):
            term = term * 1j * (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0 * x)
            mag = sqrt(term.real * term.real + term.imag * term.imag)
            if not (mag < prev and prev > 1e-17):
                break
            s = s + term
            prev = mag
        phase = x - (0.5 * nu + 0.25) * M_PI
        if nu == 0:
            h0[0] = amp * (cos(phase) + 1j * sin(phase)) * s
        else:
            h1[0] = amp * (cos(phase) + 1j * sin(phase)) * s


def hankel01(x, double switch=HANKEL_SWITCH):
    """H0^(1)(x), H1^(1)(x) for x > 0; ascending series below ``switch``."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0], i
    shape = np.shape(x)
    out = np.empty((2, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    with nogil:
        for i in range(n):
            _hankel1(xv[i], switch, &o[0, i], &o[1, i])
    return out[0].reshape(shape), out[1].reshape(shape)


cdef inline double _pfq(double a, bint has_a, double b1, double b2, bint has_b2,
                        double z, double tol, int max_terms,
                        double *last, bint *converged) nogil:
    cdef double total = 1.0, term = 1.0, num, den
    cdef int n = 0, quiet = 0
    converged[0] = False
    while n < max_terms:
        if has_b2:
            term = term * ((a + n) / ((b1 + n) * (b2 + n) * (n + 1.0))) * z
        else:
            term = term * (1.0 / ((b1 + n) * (n + 1.0))) * z
        total += term
        if fabs(term) <= tol * fabs(total):
            quiet += 1
        else:
            quiet = 0
        n += 1
        if quiet >= 3:
            converged[0] = True
            break
    last[0] = fabs(term)
    return total


def _pfq_array(double a, bint has_a, double b1, double b2, bint has_b2, z,
               double tol, int max_terms):
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef Py_ssize_t n = zv.shape[0], i
    shape = np.shape(z)
    val = np.empty(n)
    last = np.empty(n)
    conv = np.empty(n, dtype=np.uint8)
    cdef double[::1] vv = val, lv = last
    cdef unsigned char[::1] cv = conv
    cdef bint c
    with nogil:
        for i in range(n):
            vv[i] = _pfq(a, has_a, b1, b2, has_b2, zv[i], tol, max_terms, &lv[i], &c)
            cv[i] = c
    return val.reshape(shape), last.reshape(shape), conv.astype(bool).reshape(shape)


def hyp0f1(double b, z, double tol, int max_terms):
    return _pfq_array(0.0, False, b, 0.0, False, z, tol, max_terms)


def hyp1f2(double a, double b1, double b2, z, double tol, int max_terms):
    return _pfq_array(a, True, b1, b2, True, z, tol, max_terms)


def bracket0_closed(s, double tol, int max_terms):
    """(pi/3) Bi + (s^2/2)[0F1 1F2 - 2 0F1 1F2] at argument s**3/9."""
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64).ravel()
    cdef Py_ssize_t n = sv.shape[0], i
    shape = np.shape(s)
    val = np.empty(n)
    last = np.empty(n)
    conv = np.empty(n, dtype=np.uint8)
    cdef double[::1] vv = val, lv = last
    cdef unsigned char[::1] cv = conv
    cdef double x, z, f1, g1, f2, g2, e1, e2, e3, e4, ai, aip, bi, bip, m
    cdef bint c1, c2, c3, c4
    with nogil:
        for i in range(n):
            x = sv[i]
            z = x * x * x / 9.0
            f1 = _pfq(0.0, False, 2.0 / 3.0, 0.0, False, z, tol, max_terms, &e1, &c1)
            g1 = _pfq(2.0 / 3.0, True, 4.0 / 3.0, 5.0 / 3.0, True, z, tol, max_terms, &e2, &c2)
            f2 = _pfq(0.0, False, 4.0 / 3.0, 0.0, False, z, tol, max_terms, &e3, &c3)
            g2 = _pfq(1.0 / 3.0, True, 2.0 / 3.0, 4.0 / 3.0, True, z, tol, max_terms, &e4, &c4)
            _airy1(x, False, &ai, &aip, &bi, &bip)
            vv[i] = M_PI / 3.0 * bi + 0.5 * x * x * (f1 * g1 - 2.0 * f2 * g2)
            m = e1
            if e2 > m:
                m = e2
            if e3 > m:
                m = e3
            if e4 > m:
                m = e4
            lv[i] = m
            cv[i] = c1 and c2 and c3 and c4
    return val.reshape(shape), last.reshape(shape), conv.astype(bool).reshape(shape)


_gl_x, _gl_w = np.polynomial.legendre.leggauss(12)
_edges = np.linspace(0.0, 40.0, 21)
_GI_NODES = np.ascontiguousarray(((_edges[:-1, None] + _edges[1:, None]) / 2
                                  + (_edges[1:, None] - _edges[:-1, None]) / 2 * _gl_x).ravel())
_GI_WEIGHTS = np.ascontiguousarray(((_edges[1:, None] - _edges[:-1, None]) / 2 * _gl_w).ravel())
_GI_BASE = np.ascontiguousarray(_GI_WEIGHTS * np.exp(-_GI_NODES) * np.sin(np.sqrt(3.0) * _GI_NODES + np.pi / 6.0))
_lag_x, _lag_w = np.polynomial.laguerre.laggauss(48)
_LAG_X = np.ascontiguousarray(_lag_x)
_LAG_W = np.ascontiguousarray(_lag_w)


def bracket0_integral(s):
    """pi * Gi(s) from non-cancelling integral representations."""
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64).ravel()
    cdef double[::1] gx = _GI_NODES, gw = _GI_BASE, lx = _LAG_X, lw = _LAG_W
    cdef Py_ssize_t n = sv.shape[0], i, j
    cdef Py_ssize_t ng = gx.shape[0], nl = lx.shape[0]
    shape = np.shape(s)
    val = np.empty(n)
    cdef double[::1] vv = val
    cdef double x, a, acc, v, c3, ai, aip, bi, bip
    with nogil:
        for i in range(n):
            x = sv[i]
            acc = 0.0
            if x >= 20.0:
                acc = 1.0
                v = 1.0
                c3 = 1.0 / (3.0 * x * x * x)
                for j in range(1, 30):
                    v = v * (3 * j - 2) * (3 * j - 1) * (3 * j) / j * c3
                    acc += v
                    if v < 1e-17:
                        break
                vv[i] = acc / x
            elif x > 0:
                c3 = 8.0 / (3.0 * x * x * x)
                for j in range(ng):
                    v = gx[j]
                    acc += gw[j] * exp(-c3 * v * v * v)
                vv[i] = 2.0 / x * acc
            else:
                a = -x if x < 0 else 1.0
                c3 = 1.0 / (3.0 * a * a * a)
                for j in range(nl):
                    v = lx[j]
                    acc += lw[j] * exp(-c3 * v * v * v)
                _airy1(x, False, &ai, &aip, &bi, &bip)
                vv[i] = M_PI * bi - acc / a
    return val.reshape(shape)
