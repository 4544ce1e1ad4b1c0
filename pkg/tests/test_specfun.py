import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lloydgreen import specfun
from lloydgreen import _pykernels
from lloydgreen.errors import AccuracyError, AiryRangeError, DomainError, SeriesConvergenceError
from lloydgreen.specfun import SpecFunAccuracy

# reference values computed with mpmath at 30 digits
HANKEL_REF = {
    (0, 0.1): 0.99750156206604 - 1.5342386513503667j,
    (0, 1.0): 0.7651976865579666 + 0.08825696421567696j,
    (0, 5.0): -0.1775967713143383 - 0.30851762524903376j,
    (0, 12.5): 0.1468840547004211 - 0.1712143068446693j,
    (0, 30.0): -0.08636798358104021 - 0.11729573168666403j,
    (1, 0.1): 0.049937526036242 - 6.4589510947020266j,
    (1, 1.0): 0.4400505857449335 - 0.7812128213002887j,
    (1, 5.0): -0.32757913759146523 + 0.14786314339122683j,
    (1, 12.5): -0.16548380461475973 - 0.1538382565375012j,
    (1, 30.0): -0.11875106261662294 + 0.08442557066174723j,
}

AIRY_REF = {
    -10.0: (0.04024123848644319, 0.99626504413279, -0.3146798296438386, 0.11941411339990923),
    -2.5: (-0.11232506769296609, 0.6788527342647943, -0.4324224718407053, -0.2204201548746296),
    0.0: (0.3550280538878172, -0.2588194037928068, 0.6149266274460007, 0.4482883573538264),
    1.0: (0.13529241631288141, -0.1591474412967932, 1.2074235949528713, 0.9324359333927756),
    5.0: (0.00010834442813607442, -0.0002474138908684625, 657.7920441711711, 1435.8190802179824),
}

# pi * Gi(s), Scorer function
SCORER_REF = {
    -5.0: -0.6318760977338108,
    0.0: 0.6439496584270346,
    2.0: 0.5307832806564398,
    8.0: 0.12551018819579265,
}


@pytest.mark.parametrize("order,x", sorted(HANKEL_REF))
def test_hankel1_reference(order, x):
    ref = HANKEL_REF[order, x]
    assert abs(specfun.hankel1(order, x) - ref) <= 1e-10 * abs(ref)


def test_hankel1_array_shape_and_domain():
    x = np.linspace(0.5, 40.0, 12).reshape(3, 4)
    assert specfun.hankel1(1, x).shape == (3, 4)
    with pytest.raises(DomainError):
        specfun.hankel1(0, 0.0)
    with pytest.raises(DomainError):
        specfun.hankel1(2, 1.0)
    with pytest.raises(DomainError):
        specfun.hankel1(0, math.nan)


def test_hankel1_continuous_across_switch():
    sw = specfun.DEFAULT_ACCURACY.asymptotic_switch
    for n in (0, 1):
        lo = specfun.hankel1(n, sw * (1 - 1e-12))
        hi = specfun.hankel1(n, sw * (1 + 1e-12))
        assert abs(lo - hi) <= 1e-10 * abs(hi)


def test_hankel_derivative_identity():
    # H0' = -H1, checked by central differences
    h = 1e-5
    for x in (0.7, 3.0, 11.0, 25.0):
        d = (specfun.hankel1(0, x + h) - specfun.hankel1(0, x - h)) / (2 * h)
        assert abs(d + specfun.hankel1(1, x)) <= 1e-6 * abs(specfun.hankel1(1, x))


def _asymptotic_rel_dev(order, x):
    phase = x - math.pi / 4 - order * math.pi / 2
    lead = np.sqrt(2 / (math.pi * x)) * np.exp(1j * phase)
    h = specfun.hankel1(order, x)
    return np.abs(h - lead) / np.abs(h)


def test_hankel1_order1_asymptotic_bound():
    # required invariant: deviation <= 0.1/x for x >= 20
    x = np.linspace(20.0, 2000.0, 400)
    worst = float(np.max(_asymptotic_rel_dev(1, x) * x))
    assert worst <= 0.1, f"max x * deviation = {worst:.6g}"


def test_hankel1_order0_asymptotic_bound():
    # required invariant: relative deviation <= 1e-3 for x >= 50
    x = np.linspace(50.0, 2000.0, 400)
    dev = _asymptotic_rel_dev(0, x)
    assert float(np.max(dev)) <= 1e-3, f"max deviation {np.max(dev):.6g} at x = {x[np.argmax(dev)]:g}"


@pytest.mark.parametrize("order,coef", [(0, 1 / 8), (1, 3 / 8)])
def test_hankel1_leading_correction(order, coef):
    # next asymptotic term has modulus |4n^2 - 1| / (8x)
    for x in (200.0, 1000.0, 5000.0):
        assert _asymptotic_rel_dev(order, x) * x == pytest.approx(coef, rel=5e-3)


@pytest.mark.parametrize("s", sorted(AIRY_REF))
def test_airy_reference(s):
    got = specfun.airy(s)
    for g, r in zip(got, AIRY_REF[s]):
        assert abs(g - r) <= 1e-12 * max(1.0, abs(r))


def test_airy_components_and_scaled():
    s = np.array([-3.0, 0.5, 7.0])
    ai, aip, bi, bip = specfun.airy(s)
    np.testing.assert_allclose(specfun.airy_ai(s), ai, rtol=0, atol=0)
    np.testing.assert_allclose(specfun.airy_bi_prime(s), bip, rtol=0, atol=0)
    sai, saip, sbi, sbip = specfun.airy_scaled(s)
    zeta = np.where(s > 0, 2 / 3 * np.abs(s) ** 1.5, 0.0)
    np.testing.assert_allclose(sai * np.exp(-zeta), ai, rtol=1e-13)
    np.testing.assert_allclose(sbi * np.exp(zeta), bi, rtol=1e-13)


def test_airy_range():
    with pytest.raises(AiryRangeError) as exc:
        specfun.airy_bi(specfun.BI_SIGMA_MAX + 1)
    assert exc.value.bound == specfun.BI_SIGMA_MAX
    with pytest.raises(AiryRangeError):
        specfun.airy_ai(2 * specfun.AIRY_SIGMA_MIN)
    # Ai alone is fine beyond the Bi limit
    assert 0 < specfun.airy_ai(100.0) < 1e-280


def test_wronskian_grid():
    s = np.arange(-120, 61) / 10.0
    ai, aip, bi, bip = specfun.airy(s)
    assert np.max(np.abs(ai * bip - aip * bi - 1 / math.pi)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(-40.0, 20.0))
def test_wronskian_property(s):
    ai, aip, bi, bip = specfun.airy(s)
    w = ai * bip - aip * bi
    assert abs(w - 1 / math.pi) <= 1e-10 * max(1.0, abs(ai * bip))


@settings(max_examples=40, deadline=None)
@given(st.floats(-20.0, 10.0).filter(lambda s: abs(s) > 1e-3))
def test_airy_ode_property(s):
    h = 1e-3 * max(1.0, abs(s)) ** -0.5
    f = specfun.airy_ai
    d2 = (f(s + h) - 2 * f(s) + f(s - h)) / h**2
    scale = max(abs(s * f(s)), abs(f(s)) * 1e-3, 1e-300)
    assert abs(d2 - s * f(s)) <= 1e-4 * max(scale, abs(specfun.airy(s)[1]))


def test_hyp_reference():
    assert specfun.hyp0f1(2 / 3, 1.0) == pytest.approx(3.0102545337793987, rel=1e-13)
    assert specfun.hyp0f1(4 / 3, -20.0) == pytest.approx(0.03244807090678817, rel=1e-11)
    assert specfun.hyp1f2(1, 4 / 3, 5 / 3, -5.0) == pytest.approx(-0.025705331472538232, rel=1e-11)
    assert specfun.hyp1f2(1, 2 / 3, 4 / 3, 8.0) == pytest.approx(56.976642703945274, rel=1e-13)


def test_hyp_reduces_to_known_functions():
    # 0F1(;3/2;-x^2/4) = sin(x)/x ; 1F2 with a = b1 is 0F1
    x = 3.7
    assert specfun.hyp0f1(1.5, -x * x / 4) == pytest.approx(math.sin(x) / x, rel=1e-13)
    z = np.linspace(-30, 30, 7)
    np.testing.assert_allclose(specfun.hyp1f2(0.7, 0.7, 1.9, z), specfun.hyp0f1(1.9, z), rtol=1e-11)


def test_hyp_errors():
    with pytest.raises(DomainError):
        specfun.hyp0f1(-2.0, 1.0)
    with pytest.raises(DomainError):
        specfun.hyp1f2(1.0, 0.0, 1.5, 1.0)
    with pytest.raises(DomainError):
        specfun.hyp0f1(1.0, 2 * specfun.HYP_Z_MAX)
    tight = SpecFunAccuracy(series_max_terms=3)
    with pytest.raises(SeriesConvergenceError) as exc:
        specfun.hyp0f1(1.0, 50.0, tight)
    assert exc.value.last_term > 0


@pytest.mark.parametrize("s", sorted(SCORER_REF))
def test_bracket_reference(s):
    assert specfun.airy_corner_bracket(s) == pytest.approx(SCORER_REF[s], rel=1e-10)


def test_bracket_paths_agree_in_window():
    for s in (-6.0, -5.5, -5.0, 2.5, 3.0, 3.5, 4.0):
        c = specfun.airy_corner_bracket(s, path="closed")
        i = specfun.airy_corner_bracket(s, path="integral")
        assert abs(c - i) <= 1e-9 * max(1.0, abs(i))


def test_bracket_lambda_and_types():
    s = 1.3
    base = specfun.airy_corner_bracket(s)
    assert isinstance(base, float)
    z = specfun.airy_corner_bracket(s, 0.4 - 2j)
    assert isinstance(z, complex)
    assert z == pytest.approx(base + (0.4 - 2j) * specfun.airy_ai(s), rel=1e-14)
    arr = specfun.airy_corner_bracket(np.array([0.0, 2.0]))
    assert arr.shape == (2,)


def test_bracket_closed_refused_outside_window():
    with pytest.raises(AccuracyError) as exc:
        specfun.airy_corner_bracket(10.0, path="closed")
    assert exc.value.estimate > specfun.BRACKET_MAX_ERROR
    with pytest.raises(AccuracyError):
        specfun.airy_corner_bracket(0.0, path="integral")
    assert specfun.bracket_cancellation_estimate(10.0) > 1e-6
    assert specfun.bracket_cancellation_estimate(0.5) < 1e-12


def test_bracket_large_sigma_decay():
    for s in (20.0, 60.0):
        # pi Gi(s) ~ (1/s)(1 + 2/s^3 + 40/s^6 + ...)
        assert specfun.airy_corner_bracket(s) * s == pytest.approx(1 + 2 / s**3, rel=50 / s**6)


def test_accuracy_validation():
    with pytest.raises(ValueError):
        SpecFunAccuracy(target_rel_err=0.0)
    with pytest.raises(ValueError):
        SpecFunAccuracy(series_max_terms=0)


def test_backends_agree():
    from lloydgreen._backend import kernels
    if kernels is _pykernels:
        pytest.skip("compiled kernels not built")
    s = np.linspace(-30, 30, 241)
    for a, b in zip(kernels.airy(s), _pykernels.airy(s)):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)
    x = np.linspace(0.05, 60, 301)
    for a, b in zip(kernels.hankel01(x, 12.0), _pykernels.hankel01(x, 12.0)):
        np.testing.assert_allclose(a, b, rtol=1e-12)
    z = np.linspace(-40, 40, 81)
    np.testing.assert_allclose(kernels.hyp1f2(1 / 3, 2 / 3, 4 / 3, z, 1e-14, 500)[0],
                               _pykernels.hyp1f2(1 / 3, 2 / 3, 4 / 3, z, 1e-14, 500)[0], rtol=1e-12)
