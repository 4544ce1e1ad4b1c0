import math
import warnings

import numpy as np
import pytest
from scipy import integrate, special

from lloydgreen.corner_green import (
    PHASE_LIMIT,
    CornerGeometry,
    FreeBeam,
    green_corner,
    psi_asymptotic,
    psi_exact,
    scan_screen_free,
)
from lloydgreen.errors import InvariantError, PhaseAccuracyWarning, QuadratureError, SingularityError
from lloydgreen.oracles import helmholtz_residual, psi_from_boundary, psi_from_h0_derivative
from lloydgreen.quadrature import QuadratureSpec

GEO = CornerGeometry(20.0, 0.05, 600.0)
BEAM = FreeBeam(1.0)


def _psi_scipy(y, geo, beam):
    """Independent evaluation with scipy Hankel functions and QUADPACK."""
    k, z = beam.k, geo.screen_z

    def h(t):
        rho = math.hypot(t, z)
        return special.hankel1(1, k * rho) / rho

    def window(c):
        lo, hi = c - geo.delta / 2, c + geo.delta / 2
        re = integrate.quad(lambda t: h(t).real, lo, hi, epsabs=1e-14, epsrel=1e-12)[0]
        im = integrate.quad(lambda t: h(t).imag, lo, hi, epsabs=1e-14, epsrel=1e-12)[0]
        return re + 1j * im

    return beam.amplitude_c * 0.5j * k * z * (window(geo.y_sl - y) - window(geo.y_sl + y))


def test_geometry_invariants():
    with pytest.raises(InvariantError, match="slit entirely above the mirror plane"):
        CornerGeometry(1.0, 2.0, 5.0)
    with pytest.raises(InvariantError) as exc:
        CornerGeometry(1.0, 0.1, -5.0)
    assert exc.value.field == "screen_z"
    with pytest.raises(InvariantError):
        FreeBeam(0.0)
    assert FreeBeam(2.0, 3).amplitude_c == 3 + 0j


def test_green_dirichlet_planes():
    rng = np.random.default_rng(7)
    src = np.array([0.3, 1.2, 0.8])
    for _ in range(20):
        x, y, z = rng.uniform(-3, 3), rng.uniform(0.1, 4), rng.uniform(0.1, 4)
        assert green_corner([x, 0.0, z], src, 2.0) == 0
        assert green_corner([x, y, 0.0], src, 2.0) == 0


def test_green_reciprocity_and_broadcast():
    a = np.array([0.2, 1.0, 2.0])
    b = np.array([-0.5, 0.4, 0.9])
    assert green_corner(a, b, 1.7) == pytest.approx(green_corner(b, a, 1.7), rel=1e-14)
    pts = np.array([a, a + 0.1, a + 0.2])
    vals = green_corner(pts, b, 1.7)
    assert vals.shape == (3,)
    assert vals[1] == green_corner(a + 0.1, b, 1.7)


def test_green_helmholtz_residual():
    rng = np.random.default_rng(11)
    k = 1.5
    for _ in range(5):
        src = rng.uniform([-1, 0.5, 0.5], [1, 2, 2])
        r = rng.uniform([-1, 0.5, 0.5], [1, 3, 3])
        if min(np.linalg.norm(r - src * [1, a, b]) for a in (1, -1) for b in (1, -1)) < 0.5:
            continue
        res = helmholtz_residual(lambda p, s: green_corner(p, s, k), k, r, src, 1e-3)
        assert res <= 1e-4


def test_green_singularity_and_phase_warning():
    src = [0.0, 1.0, 1.0]
    with pytest.raises(SingularityError):
        green_corner(src, src, 1.0)
    with pytest.raises(SingularityError):
        green_corner([0.0, -1.0, 1.0], src, 1.0)
    with pytest.warns(PhaseAccuracyWarning):
        green_corner([0.0, 2.0, 2.0], src, 2 * PHASE_LIMIT)


@pytest.mark.parametrize("y", [-37.0, 0.5, 12.0, 20.0, 55.0])
def test_psi_exact_matches_scipy(y):
    ref = _psi_scipy(y, GEO, BEAM)
    assert abs(psi_exact(y, GEO, BEAM) - ref) <= 1e-8 * abs(ref)


def test_psi_exact_antisymmetry_and_mirror():
    ys = np.linspace(-60, 60, 121)
    psi = psi_exact(ys, GEO, BEAM)
    assert np.array_equal(psi, -psi[::-1])
    assert psi[60] == 0


def test_psi_exact_scale_invariance():
    # psi depends on lengths only through k * length
    a = psi_exact(7.0, GEO, BEAM)
    geo2 = CornerGeometry(GEO.y_sl / 4, GEO.delta / 4, GEO.screen_z / 4)
    b = psi_exact(7.0 / 4, geo2, FreeBeam(4.0))
    assert abs(a - b) <= 1e-10 * abs(a)


def test_psi_exact_linear_in_amplitude():
    a = psi_exact(5.0, GEO, BEAM)
    b = psi_exact(5.0, GEO, FreeBeam(1.0, 2 - 3j))
    assert b == pytest.approx((2 - 3j) * a, rel=1e-14)


def test_psi_exact_array_and_result():
    ys = np.array([[1.0, 2.0], [3.0, 4.0]])
    val, res = psi_exact(ys, GEO, BEAM, return_result=True)
    assert val.shape == (2, 2)
    assert res.converged and res.err_estimate < 1e-9


def test_psi_exact_nonconvergence_raises():
    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=8)
    with pytest.raises(QuadratureError):
        psi_exact(3.0, CornerGeometry(20.0, 15.0, 30.0), BEAM, spec)


def test_asymptotic_limit():
    # relative difference shrinks as delta -> 0 at large z
    ys = np.linspace(-60, 60, 61)
    errs = []
    for z in (600.0, 2400.0):
        geo = CornerGeometry(20.0, 0.05, z)
        e = psi_exact(ys, geo, BEAM)
        a = psi_asymptotic(ys, geo, BEAM)
        errs.append(np.linalg.norm(e - a) / np.linalg.norm(e))
    assert errs[0] < 5e-3
    assert errs[1] < errs[0]


def test_asymptotic_antisymmetric_scalar():
    assert psi_asymptotic(0.0, GEO, BEAM) == 0
    assert isinstance(psi_asymptotic(3.0, GEO, BEAM), complex)
    assert psi_asymptotic(3.0, GEO, BEAM) == -psi_asymptotic(-3.0, GEO, BEAM)


def test_boundary_and_h0_routes_agree():
    geo = CornerGeometry(5.0, 0.5, 40.0)
    for y in (2.5, 5.0):
        a = psi_exact(y, geo, BEAM)
        assert abs(psi_from_boundary(y, geo, BEAM) - a) <= 1e-6 * abs(a)
        assert abs(psi_from_h0_derivative(y, geo, BEAM) - a) <= 1e-4 * abs(a)


def test_scan_order_and_intensity():
    ys = [3.0, -1.0, 0.0, 10.0]
    pts = scan_screen_free(GEO, BEAM, ys)
    assert [p.y for p in pts] == ys
    for p in pts:
        assert p.intensity == abs(p.psi) ** 2
        assert p.flags == ()
    assert pts[2].intensity == 0


def test_scan_flags_phase_accuracy():
    geo = CornerGeometry(20.0, 0.05, 2 * PHASE_LIMIT)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pts = scan_screen_free(geo, BEAM, [1.0, 2.0], "asymptotic", on_error="flag")
    assert all("phase_accuracy" in p.flags for p in pts)
    with pytest.warns(PhaseAccuracyWarning):
        scan_screen_free(geo, BEAM, [1.0], "asymptotic")


def test_scan_flags_nonconverged():
    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=8)
    geo = CornerGeometry(20.0, 15.0, 30.0)
    pts = scan_screen_free(geo, BEAM, [0.0, 3.0], spec=spec, on_error="flag")
    assert pts[1].flags == ("nonconverged",)
    assert math.isnan(pts[1].intensity)
    with pytest.raises(QuadratureError):
        scan_screen_free(geo, BEAM, [3.0], spec=spec)


def test_scan_rejects_bad_arguments():
    with pytest.raises(ValueError):
        scan_screen_free(GEO, BEAM, [0.0], method="fresnel")
    with pytest.raises(ValueError):
        scan_screen_free(GEO, BEAM, [math.nan])
