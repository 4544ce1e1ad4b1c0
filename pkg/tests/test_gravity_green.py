import math

import numpy as np
import pytest

from lloydgreen import specfun
from lloydgreen.corner_green import CornerGeometry
from lloydgreen.errors import AiryRangeError, InvariantError, QuadratureError
from lloydgreen.gravity_green import (
    HBAR,
    NEUTRON_MASS,
    STANDARD_GRAVITY,
    GravityContext,
    ScreenPoint3D,
    TransverseMode,
    ai_cutoff_sigma,
    green_gravity_corner,
    green_gravity_halfspace,
    kperp_cutoff,
    psi_gravity,
    psi_gravity_scan,
    reduced_green,
    reduced_green_internal,
    sigma,
)
from lloydgreen.quadrature import QuadratureSpec

# Half-space values from the polar form G = 2 int_0^K k J0(k rho) g dk, evaluated
# with scipy Airy functions and QUADPACK (internal units, source at the origin).
HALFSPACE_REF = [
    (30.0, 1j * math.pi, (0.5, 0.3, 0.1), -1.6808419381158317 - 0.13620007468382272j),
    (2.0, 0.0, (1.0, 0.4, -0.2), 0.3226262834686974 + 0j),
    (5.0, 0.3 - 0.2j, (2.0, 1.0, 0.5), -0.16730801254411343 + 0.027417528851867035j),
]

# Screen wave function from nested scipy quadrature (sine-weighted Fourier
# integral over k_z, mpmath Scorer function for the bracket).
GEO = CornerGeometry(3.0, 0.5, 10.0)
PSI_REF = {1.5: -0.00025472692456087674, 3.0: -0.00026455605793583174}


def test_context_units():
    ctx = GravityContext(energy_e=1e-31)
    assert ctx.mass_m == NEUTRON_MASS and ctx.hbar == HBAR and ctx.accel_g == STANDARD_GRAVITY
    lg = (HBAR ** 2 / (2 * NEUTRON_MASS ** 2 * STANDARD_GRAVITY)) ** (1 / 3)
    assert ctx.length_lg == pytest.approx(lg, rel=1e-15)
    assert ctx.length_lg == pytest.approx(5.8686e-6, rel=1e-4)
    assert ctx.e_internal * ctx.energy_unit == pytest.approx(1e-31, rel=1e-15)
    inner = GravityContext.internal(2.5)
    assert inner.length_lg == pytest.approx(1.0, rel=1e-15)
    assert inner.energy_unit == pytest.approx(1.0, rel=1e-15)


def test_context_invariants():
    with pytest.raises(InvariantError):
        GravityContext(mass_m=0.0)
    with pytest.raises(InvariantError):
        GravityContext(energy_e=math.inf)
    with pytest.raises(InvariantError):
        GravityContext(lam=complex(math.nan, 0))
    assert GravityContext.internal(1.0).with_lambda(2j).lam == 2j


def test_sigma_and_mode():
    ctx = GravityContext(energy_e=1e-31)
    mode = TransverseMode.of(ctx, 1e5, 2e5)
    e_t = 1e-31 - HBAR ** 2 * 5e10 / (2 * NEUTRON_MASS)
    assert mode.e_tilde == pytest.approx(e_t, rel=1e-14)
    x = 3e-6
    expected = (x - e_t / (NEUTRON_MASS * STANDARD_GRAVITY)) / ctx.length_lg
    assert sigma(x, mode, ctx) == pytest.approx(expected, rel=1e-14)
    # internal form: sigma = xi - e + kappa^2
    inner = GravityContext.internal(4.0)
    m = TransverseMode.of(inner, 0.5, 1.5)
    assert sigma(1.0, m, inner) == pytest.approx(1.0 - 4.0 + 2.5, rel=1e-14)


def test_reduced_green_structure():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s, sp = rng.uniform(-10, 10, 2)
        lam = complex(*rng.normal(size=2))
        assert reduced_green_internal(s, sp, lam) == reduced_green_internal(sp, s, lam)
    # jump of the derivative at the source: -1 in internal units
    sp, h = 0.7, 1e-5
    left = (reduced_green_internal(sp, sp) - reduced_green_internal(sp - h, sp)) / h
    right = (reduced_green_internal(sp + h, sp) - reduced_green_internal(sp, sp)) / h
    assert right - left == pytest.approx(-1.0, abs=1e-4)


def test_reduced_green_large_arguments():
    # scaled Airy functions: no overflow far above the turning point
    v = reduced_green_internal(400.0, 399.0)
    # pi Ai(s) Bi(s') ~ exp(-(2/3)(s^1.5 - s'^1.5)) / (2 s^(1/4) s'^(1/4))
    approx = math.exp(-2 / 3 * (400 ** 1.5 - 399 ** 1.5)) / (2 * (400 * 399) ** 0.25)
    assert v == pytest.approx(approx, rel=1e-3)
    assert math.isfinite(reduced_green_internal(5000.0, 10.0))


def test_reduced_green_si_scaling():
    ctx = GravityContext(energy_e=5e-32, lam=0.3)
    mode = TransverseMode.of(ctx, 0.0, 0.0)
    x, xs = 2e-6, 7e-6
    g = reduced_green(x, xs, mode, ctx)
    ref = ctx.length_lg * reduced_green_internal(sigma(x, mode, ctx), sigma(xs, mode, ctx), 0.3)
    assert g == ref
    with pytest.raises(AiryRangeError):
        reduced_green(-1.0, xs, mode, ctx)


def test_kperp_cutoff_certificate():
    s = ai_cutoff_sigma(1e-12)
    assert specfun.airy_ai(s) < 1e-12
    assert specfun.airy_ai(s - 1e-6) > 1e-12
    k, cert = kperp_cutoff(-3.0, 1e-12)
    assert k * k == pytest.approx(s + 3.0, rel=1e-12)
    assert cert["ai_at_cutoff"] < cert["bound"] == 1e-12
    k2, _ = kperp_cutoff(-3.0, 1e-12, decay_length=0.1)
    assert math.exp(-0.1 * math.sqrt(k2 * k2 - 3.0)) <= 1e-12 * (1 + 1e-9)
    with pytest.raises(ValueError):
        ai_cutoff_sigma(1.0)


@pytest.mark.parametrize("e,lam,r,ref", HALFSPACE_REF)
def test_halfspace_matches_polar_reference(e, lam, r, ref):
    g = green_gravity_halfspace(r, (0.0, 0.0, 0.0), GravityContext.internal(e, lam))
    assert abs(g - ref) <= 1e-9 * abs(ref)


def test_halfspace_riemann_cross_check():
    # brute-force midpoint sum on a 400 x 400 k_perp grid
    e, lam, r = 2.0, 0.0, np.array([1.0, 0.4, -0.2])
    k_max = 9.0
    n = 400
    k = (np.arange(n) + 0.5) / n * 2 * k_max - k_max
    ky, kz = np.meshgrid(k, k, indexing="ij")
    g = reduced_green_internal(r[0] - e + ky ** 2 + kz ** 2, -e + ky ** 2 + kz ** 2, lam)
    dk = 2 * k_max / n
    brute = 4 * math.pi * np.sum(np.exp(1j * (ky * r[1] + kz * r[2])) * g) * dk * dk / (4 * math.pi ** 2)
    lib = green_gravity_halfspace(r, (0, 0, 0), GravityContext.internal(e, lam), k_max=k_max)
    assert abs(brute - lib) <= 1e-6 * abs(lib)


def test_halfspace_local_outgoing_wave():
    # with lam = i pi the field is outgoing; near the source G ~ exp(i k R)/R
    ctx = GravityContext.internal(30.0, 1j * math.pi)
    r = np.array([0.5, 0.3, 0.1])
    g = green_gravity_halfspace(r, (0, 0, 0), ctx)
    rr = np.linalg.norm(r)
    k = math.sqrt(30.0 - 0.25)
    assert abs(g - np.exp(1j * k * rr) / rr) <= 1e-2 * abs(g)


def test_halfspace_si_matches_internal():
    ctx = GravityContext(energy_e=3e-31, lam=0.5)
    lg = ctx.length_lg
    r = np.array([1.0, 0.4, -0.2]) * lg
    g_si = green_gravity_halfspace(r, (0, 0, 0), ctx)
    g_int = green_gravity_halfspace(r / lg, (0, 0, 0), GravityContext.internal(ctx.e_internal, 0.5))
    assert g_si == pytest.approx(g_int / lg, rel=1e-10)


def test_corner_green_dirichlet_and_image_sum():
    ctx = GravityContext.internal(4.0)
    src = (0.5, 0.8, 0.6)
    assert green_gravity_corner((1.0, 0.0, 0.7), src, ctx) == 0
    assert green_gravity_corner((1.0, 0.5, 0.0), src, ctx) == 0
    r = np.array([1.0, 0.5, 0.9])
    total = 0
    for a in (1, -1):
        for b in (1, -1):
            img = (src[0], a * src[1], b * src[2])
            total += a * b * green_gravity_halfspace(r, img, ctx, k_max=12.0)
    corner = green_gravity_corner(r, src, ctx, k_max=12.0)
    assert abs(corner - total) <= 1e-8 * abs(corner)


def test_green_rejects_coincident_and_reports_failure():
    ctx = GravityContext.internal(1.0)
    with pytest.raises(ValueError):
        green_gravity_halfspace((1, 1, 1), (1, 1, 1), ctx)
    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=8)
    with pytest.raises(QuadratureError):
        green_gravity_halfspace((1.0, 0.4, 0.3), (0, 0, 0), ctx, spec=spec)


@pytest.mark.parametrize("y", sorted(PSI_REF))
def test_psi_matches_nested_reference(y):
    got = psi_gravity(ScreenPoint3D(1.0, y, 10.0), GEO, GravityContext.internal(5.0))
    assert abs(got - PSI_REF[y]) <= 1e-7 * abs(PSI_REF[y])


def test_psi_structure():
    ys = np.linspace(-6, 6, 33)
    res = psi_gravity_scan([0.0, 1.5], ys, GEO, GravityContext.internal(5.0, 0.4 + 0.1j))
    assert res.psi.shape == (2, 33)
    assert np.all(res.psi[:, 16] == 0)
    np.testing.assert_array_equal(res.psi, -res.psi[:, ::-1])
    assert np.all(res.converged)
    assert np.all(res.ai_at_cutoff < 1e-12)


def test_psi_linear_in_lambda_and_amplitude():
    p = ScreenPoint3D(1.0, 1.5, 10.0)
    base = psi_gravity(p, GEO, GravityContext.internal(5.0))
    with_l = psi_gravity(p, GEO, GravityContext.internal(5.0, 1.0))
    with_2l = psi_gravity(p, GEO, GravityContext.internal(5.0, 2.0))
    assert (with_2l - base) == pytest.approx(2 * (with_l - base), rel=1e-7)
    scaled = psi_gravity(p, GEO, GravityContext.internal(5.0, 0.0, 2j))
    assert scaled == pytest.approx(2j * base, rel=1e-14)


def test_psi_small_slit_scaling():
    p = ScreenPoint3D(0.0, 1.5, 10.0)
    ctx = GravityContext.internal(5.0)
    q = []
    for frac in (1e-2, 1e-3):
        d = frac * GEO.y_sl
        spec = QuadratureSpec(abs_tol=1e-10 * frac)
        q.append(psi_gravity(p, CornerGeometry(GEO.y_sl, d, GEO.screen_z), ctx, spec=spec) / d)
    assert abs(q[0] / q[1] - 1) <= 1e-3


def test_psi_si_matches_internal():
    ctx = GravityContext(energy_e=5e-31)
    lg = ctx.length_lg
    geo_si = CornerGeometry(GEO.y_sl * lg, GEO.delta * lg, GEO.screen_z * lg)
    si = psi_gravity(ScreenPoint3D(lg, 1.5 * lg, GEO.screen_z * lg), geo_si, ctx)
    inner = psi_gravity(ScreenPoint3D(1.0, 1.5, GEO.screen_z), GEO, GravityContext.internal(ctx.e_internal))
    assert si == pytest.approx(inner, rel=1e-9)


def test_psi_requires_screen_plane():
    with pytest.raises(ValueError):
        psi_gravity(ScreenPoint3D(1.0, 1.0, 5.0), GEO, GravityContext.internal(5.0))


def test_psi_scan_failure_flag():
    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=8)
    res = psi_gravity_scan([1.0], [1.0], GEO, GravityContext.internal(5.0), spec=spec,
                           raise_on_failure=False)
    assert not res.converged[0]
    with pytest.raises(QuadratureError):
        psi_gravity_scan([1.0], [1.0], GEO, GravityContext.internal(5.0), spec=spec)
