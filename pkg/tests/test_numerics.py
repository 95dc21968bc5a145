import math

import mpmath
import numpy as np
import pytest

from collective_dephasing.errors import AccuracyError, DomainError
from collective_dephasing.numerics import (
    KUMMER_GUARD,
    QuadratureSpec,
    _kummer_asymptotic_scaled,
    _kummer_polynomial,
    _kummer_series,
    gamma_fn,
    integrate_semi_infinite,
    kummer_m,
    kummer_m_scaled,
    rgamma,
)


# ---------------------------------------------------------------------------
# Gamma


@pytest.mark.parametrize("x, expected", [
    (1.0, 1.0),
    (0.5, math.sqrt(math.pi)),
    (2.5, 1.3293403881791370),
    (3.5, 3.3233509704478426),
    (6.0, 120.0),
])
def test_gamma_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x", np.linspace(0.05, 40.0, 37))
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan")])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_fn(x)


def test_rgamma_poles():
    assert rgamma(0.0) == 0.0
    assert rgamma(-3.0) == 0.0
    assert rgamma(-0.5) == pytest.approx(1 / math.gamma(-0.5), rel=1e-15)


# ---------------------------------------------------------------------------
# Kummer


KUMMER_CASES = [
    (-2.0, 0.5, 0.3), (-1.0, 0.5, 3.0), (-3.0, 0.5, 45.0),       # polynomials
    (-0.5, 0.5, 1.0), (-1.5, 0.5, 10.0), (-2.5, 0.5, 29.0),      # s odd, series
    (-0.5, 0.5, 31.0), (-1.5, 0.5, 60.0), (-2.5, 0.5, 400.0),    # s odd, asymptotic
    (-0.7, 0.5, 35.0), (-2.2, 0.5, 150.0), (-3.1, 0.5, 1000.0),
    (0.3, 1.5, 5.0), (1.7, 2.5, 80.0), (2.0, 0.5, 40.0),
    (0.5, 0.5, 900.0),
]


@pytest.mark.parametrize("a, b, z", KUMMER_CASES)
def test_kummer_scaled_matches_mpmath(a, b, z):
    with mpmath.workdps(40):
        ref = float(mpmath.exp(-z) * mpmath.hyp1f1(a, b, z))
    assert kummer_m_scaled(a, b, z) == pytest.approx(ref, rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("a, b, z", [c for c in KUMMER_CASES if c[2] < 300])
def test_kummer_unscaled_matches_mpmath(a, b, z):
    with mpmath.workdps(40):
        ref = float(mpmath.hyp1f1(a, b, z))
    assert kummer_m(a, b, z) == pytest.approx(ref, rel=1e-10)


def test_kummer_doctest_value():
    assert kummer_m(-1, 0.5, 3.0) == -5.0


@pytest.mark.parametrize("m", [0, 1, 2, 3, 5, 8])
@pytest.mark.parametrize("z", [0.0, 0.7, 12.0, 31.0])
def test_kummer_polynomial_matches_series(m, z):
    poly = _kummer_polynomial(m, 0.5, z)
    ser, _ = _kummer_series(-float(m), 0.5, z)
    assert poly == pytest.approx(ser, rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("a, b", [(-0.5, 0.5), (-1.5, 0.5), (-2.5, 0.5), (-0.7, 0.5),
                                  (-2.2, 0.5), (0.3, 1.5), (1.2, 2.0)])
@pytest.mark.parametrize("z", np.linspace(KUMMER_GUARD[0], KUMMER_GUARD[1], 5))
def test_kummer_branches_agree_in_crossover(a, b, z):
    ser, _ = _kummer_series(a, b, z)
    asym, _ = _kummer_asymptotic_scaled(a, b, z)
    ser *= math.exp(-z)
    assert asym == pytest.approx(ser, rel=1e-8)


def test_kummer_kummer_transform():
    # exp(-z) M(a, b, z) = M(b - a, b, -z); the left side is evaluated here,
    # the right side through mpmath
    for a, z in [(-2.0, 3.3), (-1.3, 7.0)]:
        ref = float(mpmath.hyp1f1(0.5 - a, 0.5, -z))
        assert kummer_m_scaled(a, 0.5, z) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("a, b, z", [(1.0, 0.0, 1.0), (1.0, -2.0, 1.0), (1.0, 0.5, -1.0)])
def test_kummer_domain(a, b, z):
    with pytest.raises(DomainError):
        kummer_m(a, b, z)


# ---------------------------------------------------------------------------
# quadrature


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=-1.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_panels=0)


@pytest.mark.parametrize("f, exact, scale", [
    (lambda x: np.exp(-x), 1.0, 1.0),
    (lambda x: np.exp(-x * x), math.sqrt(math.pi) / 2, 1.0),
    (lambda x: x ** 4 * np.exp(-(x / 0.01) ** 2), 0.5 * 0.01 ** 5 * math.gamma(2.5), 0.01),
    (lambda x: np.exp(-x) * np.cos(x), 0.5, 1.0),
])
def test_quadrature_known_integrals(f, exact, scale):
    assert integrate_semi_infinite(f, scale=scale) == pytest.approx(exact, rel=1e-10)


def _oscillatory_reference(p, a, b):
    """int_0^inf x^p exp(-a x^2) (1 - cos b x) dx."""
    with mpmath.workdps(30):
        h = (p + 1) / 2
        base = mpmath.gamma(h) / (2 * mpmath.power(a, h))
        return float(base * (1 - mpmath.hyp1f1(h, 0.5, -b * b / (4 * a))))


def _random_integrands(n=50, seed=20240601):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        p = rng.uniform(0.0, 6.0)
        a = rng.uniform(0.5, 4.0)
        b = 10 ** rng.uniform(-1, 1.5)
        out.append((p, a, b))
    return out


def _make(p, a, b):
    return lambda x: x ** p * np.exp(-a * x * x) * 2 * np.sin(0.5 * b * x) ** 2


@pytest.mark.parametrize("p, a, b", _random_integrands())
def test_quadrature_random_oscillatory(p, a, b):
    val, err = integrate_semi_infinite(_make(p, a, b), 2 * math.pi / b, full_output=True)
    ref = _oscillatory_reference(p, a, b)
    assert val == pytest.approx(ref, rel=1e-9, abs=1e-13)
    assert abs(val - ref) <= 10 * err + 1e-15


def test_quadrature_linearity():
    rng = np.random.default_rng(7)
    cases = _random_integrands()
    for (p1, a1, b1), (p2, a2, b2) in zip(cases[::2], cases[1::2]):
        c1, c2 = rng.normal(size=2)
        f1, f2 = _make(p1, a1, b1), _make(p2, a2, b2)
        i1 = integrate_semi_infinite(f1)
        i2 = integrate_semi_infinite(f2)
        i12 = integrate_semi_infinite(lambda x: c1 * f1(x) + c2 * f2(x))
        assert i12 == pytest.approx(c1 * i1 + c2 * i2, rel=1e-9, abs=1e-12)


def _capped_estimate(f, period, panels):
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=0.0, max_panels=panels)
    try:
        return integrate_semi_infinite(f, period, spec, full_output=True)
    except AccuracyError as exc:
        return exc.estimate, exc.error


@pytest.mark.parametrize("p, a, b", _random_integrands())
def test_quadrature_panel_doubling(p, a, b):
    # the error bound shrinks as the panel budget doubles, and stays honest
    f, period = _make(p, a, b), 2 * math.pi / b
    ref = _oscillatory_reference(p, a, b)
    previous = math.inf
    for panels in (16, 32, 64, 128, 256):
        est, err = _capped_estimate(f, period, panels)
        assert err <= previous
        assert abs(est - ref) <= err + 1e-14 * abs(ref)
        previous = err


def test_quadrature_panel_cap_reports_estimate():
    f = _make(2.0, 1.0, 5.0)
    with pytest.raises(AccuracyError) as info:
        integrate_semi_infinite(f, 2 * math.pi / 5.0, QuadratureSpec(rel_tol=1e-15, abs_tol=0.0, max_panels=4))
    assert math.isfinite(info.value.estimate)
    assert info.value.error > 0


def test_quadrature_rejects_non_decaying():
    with pytest.raises(AccuracyError):
        integrate_semi_infinite(lambda x: np.ones_like(x))


def test_quadrature_narrow_support_slow_oscillation():
    # support far narrower than the half period must still be resolved
    w = 1e-3
    f = lambda x: x ** 4 * np.exp(-(x / w) ** 2) * 2 * np.sin(0.5 * 0.05 * x) ** 2
    ref = 0.5 * w ** 5 * math.gamma(2.5) * (1 - float(mpmath.hyp1f1(2.5, 0.5, -(0.05 * w) ** 2 / 4)))
    assert integrate_semi_infinite(f, 2 * math.pi / 0.05, scale=w) == pytest.approx(ref, rel=1e-8)
