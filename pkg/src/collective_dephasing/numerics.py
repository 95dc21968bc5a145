"""Special functions and quadrature used by the dephasing formulas.

Everything here is a pure function of its arguments.  The Kummer function is
evaluated in three regimes:

* ``a`` a non-positive integer: the hypergeometric series terminates and is
  summed exactly as a polynomial;
* ``z < KUMMER_SWITCH``: the convergent power series;
* ``z >= KUMMER_SWITCH``: the large-argument expansion
  ``M(a,b,z) ~ Gamma(b)/Gamma(a) e^z z^(a-b) + Gamma(b)/Gamma(b-a) (-z)^(-a)``
  summed to its smallest term, plus the exponentially small Stokes-smoothing
  correction of Paris (2013) that removes the optimal-truncation error.

References
----------
.. [dlmf] NIST Digital Library of Mathematical Functions, ch. 13.
.. [paris] R. B. Paris, "Exponentially small expansions of the confluent
   hypergeometric functions", Appl. Math. Sci. 7 (2013) 6601.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AccuracyError, DomainError

__all__ = [
    "QuadratureSpec",
    "gamma_fn",
    "rgamma",
    "kummer_m",
    "kummer_m_scaled",
    "integrate_semi_infinite",
    "KUMMER_SWITCH",
]

KUMMER_SWITCH = 30.0
# Window above the switch in which both branches are evaluated and compared.
KUMMER_GUARD = (30.0, 32.0)
KUMMER_GUARD_TOL = 1e-9
# Beyond this the power series overflows double precision.
_SERIES_ZMAX = 700.0
_OPTIMAL_ZMAX = 200.0
_EPS = np.finfo(float).eps
# initial panels are fixed independently of max_panels, so runs with a larger
# budget continue the same bisection sequence
_MAX_INITIAL_PANELS = 2048


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate_semi_infinite`."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_panels: int = 20000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if int(self.max_panels) != self.max_panels or self.max_panels < 1:
            raise DomainError(f"max_panels must be a positive integer, got {self.max_panels}")


# ---------------------------------------------------------------------------
# Gamma function


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma function, zero at the poles 0, -1, -2, ..."""
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


# ---------------------------------------------------------------------------
# Kummer's function M(a, b, z)


def _kummer_polynomial(m: int, b: float, z: float) -> float:
    """M(-m, b, z), a polynomial of degree m, by Horner-like nesting."""
    # Sum the terminating series from the highest power down for accuracy.
    coeffs = [1.0]
    for n in range(m):
        coeffs.append(coeffs[-1] * (n - m) / ((b + n) * (n + 1)))
    res = 0.0
    for c in reversed(coeffs):
        res = res * z + c
    return res


def _kummer_series(a: float, b: float, z: float, max_terms: int = 5000):
    """Power series; returns (value, error estimate)."""
    term = 1.0
    total = 1.0
    abs_sum = 1.0
    for n in range(max_terms):
        term *= (a + n) / (b + n) * z / (n + 1)
        total += term
        abs_sum += abs(term)
        if n > abs(a) and abs(term) <= _EPS * abs(total):
            return total, 4 * _EPS * abs_sum
    raise AccuracyError(
        f"Kummer series did not converge for a={a}, b={b}, z={z}",
        estimate=total, error=abs(term),
    )


# Polynomial coefficients g_k(y) in the Stokes-smoothing correction [paris].
_PARIS_G = (
    np.array([0, 0, 0, 0, 0, 0, 0, 0, -1, 2 / 3]),
    np.array([0, 0, 0, 0, 0, 0, -90, 270, -225, 46]) / 15,
    np.array([0, 0, 0, 0, -756, 5040, -11760, 11340, -3969, 230]) / 70,
    np.array([0, 0, -3240, 37800, -170100, 370440, -397530, 183330, -17781, -3226]) / 350,
    np.array([-1069200, 19245600, -141134400, 541870560, -1160830440, 1353607200,
              -743046480, 88280280, 43924815, -4032746]) / 231000,
)


def _poch(x: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= x + i
    return out


def _kummer_asymptotic_scaled(a: float, b: float, z: float, max_terms: int = 500):
    """e^{-z} M(a, b, z) for large positive z; returns (value, error estimate).

    Uses Kummer's transformation e^{-z}M(a,b,z) = M(b-a, b, -z) and the
    expansion of M on the negative real axis.  The algebraic series is the
    scaled dominant term; the exponentially small part carries the
    ``(-z)^(-a)`` term (real part ``cos(pi a) z^(-a)``) and the smoothing of
    the optimally truncated algebraic series.
    """
    # algebraic part: Gamma(b)/Gamma(a) z^(a-b) sum_k (b-a)_k (1-a)_k / (k! z^k)
    c_alg = math.gamma(b) * rgamma(a) * z ** (a - b) if rgamma(a) != 0.0 else 0.0
    # Below _OPTIMAL_ZMAX the series is summed to its smallest term so the
    # smoothing correction applies; above it e^{-z} is negligible and the sum
    # stops at machine precision.
    optimal = z < _OPTIMAL_ZMAX
    terms = 0
    s_alg = 1.0
    last = 1.0
    truncated_at_minimum = False
    if c_alg != 0.0:
        term = 1.0
        k = 0
        while k < max_terms:
            nxt = term * (b - a + k) * (1 - a + k) / ((k + 1) * z)
            if nxt == 0.0:
                break
            if abs(nxt) > abs(term) and k > abs(a) + abs(b - a) + 2:
                truncated_at_minimum = True
                break
            s_alg += nxt
            term = nxt
            k += 1
            if not optimal and abs(nxt) <= _EPS * abs(s_alg):
                break
        else:
            raise AccuracyError(
                f"asymptotic series for M({a}, {b}, {z}) did not reach its minimum term",
                estimate=c_alg * s_alg, error=abs(c_alg * term),
            )
        terms = k
        last = abs(term)

    # exponentially small part, in the variables of M(a', b, -x) with
    # a' = b - a, theta = a' - b = -a
    theta = -a
    c_exp = math.gamma(b) * rgamma(b - a) * math.exp(-z) * z ** theta
    n_corr = len(_PARIS_G)
    big_a = [_poch(1 - (b - a), k) * _poch(a, k) / math.factorial(k) for k in range(n_corr)]
    first = sum((-1) ** k * big_a[k] * z ** (-k) for k in range(n_corr))
    exp_part = c_exp * math.cos(math.pi * theta) * first
    err_exp = abs(c_exp * big_a[-1] * z ** (-(n_corr - 1)))
    if c_alg != 0.0 and truncated_at_minimum:
        # truncation index of the algebraic series, offset convention of [paris]
        v = (b - a) + terms + 1 + theta
        second = 0.0
        for idx in range(n_corr):
            bk = sum(
                (-2) ** k * _poch(0.5, k) * big_a[idx - k]
                * np.polyval(_PARIS_G[k], v - z - (idx - k)) * 6.0 ** (-2 * k)
                for k in range(idx + 1)
            )
            second += (-1) ** idx * bk * z ** (-idx)
        smoothing = -2 * math.sin(math.pi * theta) / math.sqrt(2 * math.pi * z) * second
        # sign convention: the smoothing term belongs to the Gamma(b)/Gamma(a)
        # prefactor of M(a', b, -x), i.e. Gamma(b)/Gamma(b - a) here.
        exp_part += c_exp * smoothing
        err_exp += abs(c_alg) * last * z ** (-n_corr)
    elif c_alg != 0.0 and optimal:
        err_exp += abs(c_alg) * last
    value = c_alg * s_alg + exp_part
    err = err_exp + 4 * _EPS * (abs(c_alg * s_alg) + abs(exp_part))
    return value, err


def _check_kummer_args(a, b, z):
    if _is_nonpositive_int(b):
        raise DomainError(f"Kummer M undefined for b a non-positive integer, got b={b}")
    if z < 0:
        raise DomainError(f"kummer_m requires z >= 0, got z={z}")


def kummer_m_scaled(a: float, b: float, z: float, rtol: float = 1e-12) -> float:
    """Exponentially scaled Kummer function ``exp(-z) * M(a, b, z)``.

    Finite for all ``z >= 0`` whenever the result is representable, unlike
    ``M`` itself which overflows past ``z ~ 700``.

    Raises
    ------
    DomainError
        ``b`` is a non-positive integer or ``z < 0``.
    AccuracyError
        Neither branch reaches ``rtol``, or the two branches disagree in the
        cross-validation window just above the switch point.
    """
    a, b, z = float(a), float(b), float(z)
    _check_kummer_args(a, b, z)
    if _is_nonpositive_int(a):
        return math.exp(-z) * _kummer_polynomial(int(-a), b, z)
    if z < KUMMER_SWITCH:
        val, _ = _kummer_series(a, b, z)
        return math.exp(-z) * val

    val, err = _kummer_asymptotic_scaled(a, b, z)
    scale = max(abs(val), _EPS)
    if KUMMER_GUARD[0] <= z < KUMMER_GUARD[1]:
        ser, _ = _kummer_series(a, b, z)
        ser *= math.exp(-z)
        if abs(ser - val) > KUMMER_GUARD_TOL * max(abs(ser), abs(val), _EPS):
            raise AccuracyError(
                f"Kummer branches disagree at a={a}, b={b}, z={z}: "
                f"series={ser!r}, asymptotic={val!r}",
                estimate=ser, error=abs(ser - val),
            )
    if err <= rtol * scale:
        return val
    if z < _SERIES_ZMAX:
        ser, ser_err = _kummer_series(a, b, z)
        ser_scaled = math.exp(-z) * ser
        if math.exp(-z) * ser_err <= rtol * max(abs(ser_scaled), _EPS):
            return ser_scaled
    raise AccuracyError(
        f"Kummer M({a}, {b}, {z}) cannot reach rtol={rtol}", estimate=val, error=err
    )


def kummer_m(a: float, b: float, z: float, rtol: float = 1e-12) -> float:
    """Confluent hypergeometric function ``M(a, b, z)`` for real ``z >= 0``.

    Parameters
    ----------
    a, b : float
        Parameters; ``b`` must not be a non-positive integer.
    z : float
        Argument, ``z >= 0``.
    rtol : float
        Relative accuracy demanded of the large-``z`` branch.

    Examples
    --------
    >>> kummer_m(-1, 0.5, 3.0)
    -5.0
    """
    a, b, z = float(a), float(b), float(z)
    _check_kummer_args(a, b, z)
    if _is_nonpositive_int(a):
        return _kummer_polynomial(int(-a), b, z)
    if z < KUMMER_SWITCH:
        return _kummer_series(a, b, z)[0]
    return math.exp(z) * kummer_m_scaled(a, b, z, rtol=rtol)


# ---------------------------------------------------------------------------
# Quadrature on (0, inf)

# 15-point Kronrod rule and its embedded 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])           # 15 nodes, ascending
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a: np.ndarray, b: np.ndarray):
    """Apply the rule to panels [a_i, b_i].

    Returns values, error estimates and the roundoff floor of each estimate.
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise AccuracyError("integrand returned a non-finite value")
    resk = fx @ _WK
    resg = fx @ _WG15
    mean = resk / 2.0
    resasc = np.abs(fx - mean[:, None]) @ _WK
    resabs = np.abs(fx) @ _WK
    err = np.abs(resk - resg)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0, scaled, err)
    floor = 50 * _EPS * resabs
    err = np.maximum(err, floor)
    return resk * half, np.abs(err * half), np.abs(floor * half)


def _truncation_point(f, scale: float, abs_tol: float):
    """Smallest W = scale * 2^k with |f| negligible on [W, 2W]; returns (W, tail bound)."""
    w = scale
    for _ in range(200):
        xs = np.linspace(w, 2 * w, 33)
        m = float(np.max(np.abs(f(xs))))
        if not math.isfinite(m):
            raise AccuracyError("integrand is not finite on the probe grid")
        if m * w <= 0.1 * abs_tol:
            return w, m * w
        w *= 2.0
    raise AccuracyError("integrand does not decay; cannot truncate the range")


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    oscillation_period: float | None = None,
    spec: QuadratureSpec | None = None,
    *,
    scale: float = 1.0,
    full_output: bool = False,
):
    """Integrate a decaying function over ``(0, inf)``.

    The range is truncated where ``|f|`` drops below ``spec.abs_tol`` (probed
    on doubling intervals starting at ``scale``).  With an oscillation period
    the initial panels end on half-period multiples, so each panel carries at
    most one sign change of the oscillating factor.  Panels are then bisected
    greedily, worst error first, until the tolerance is met.  Error that sits
    at the roundoff floor of the rule (``50 eps int |f|`` per panel) does not
    count against the tolerance, so strongly cancelling integrals terminate.

    Parameters
    ----------
    f : callable
        Vectorized integrand ``f(w) -> array``.  Never called at ``w = 0``.
    oscillation_period : float or None
        Period of the oscillating factor, e.g. ``2 pi / t`` for ``cos(w t)``.
    spec : QuadratureSpec
        Tolerances and the panel cap.
    scale : float
        Characteristic width of the integrand, used to start the probe.
    full_output : bool
        If True return ``(value, error_bound)``.

    Raises
    ------
    AccuracyError
        The tolerance was not met within ``spec.max_panels`` panels; the
        exception carries the best estimate and its error bound.
    """
    spec = spec or QuadratureSpec()
    if not scale > 0:
        raise DomainError(f"scale must be > 0, got {scale}")
    w_max, tail = _truncation_point(f, scale, spec.abs_tol)

    if oscillation_period is not None and math.isfinite(oscillation_period):
        if not oscillation_period > 0:
            raise DomainError("oscillation_period must be positive")
        h = 0.5 * oscillation_period
        n = math.ceil(w_max / h)
        if n > _MAX_INITIAL_PANELS:
            # group half periods; the bisection stage refines further
            h *= math.ceil(n / _MAX_INITIAL_PANELS)
            n = math.ceil(w_max / h)
        edges = h * np.arange(n + 1, dtype=float)
        if n < 8:
            # slow oscillation: keep a minimum resolution across the support
            edges = np.union1d(edges[edges < w_max], np.linspace(0.0, w_max, 9))
    else:
        edges = np.linspace(0.0, w_max, 9)

    vals, errs, floors = _gk15(f, edges[:-1], edges[1:])
    # max-heap keyed on the error above the roundoff floor; panels already at
    # the floor cannot be improved by bisection
    heap = [(-(e - fl), a, b, v, e, fl)
            for a, b, v, e, fl in zip(edges[:-1], edges[1:], vals, errs, floors)]
    heapq.heapify(heap)
    total = math.fsum(vals)
    err_total = float(np.sum(errs)) + tail
    floor_total = float(np.sum(floors))
    best = (total, err_total)

    while err_total - floor_total > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if len(heap) >= spec.max_panels:
            raise AccuracyError(
                f"quadrature did not converge within {spec.max_panels} panels",
                estimate=best[0], error=best[1],
            )
        _, a, b, v, e, fl = heapq.heappop(heap)
        m = 0.5 * (a + b)
        v2, e2, fl2 = _gk15(f, np.array([a, m]), np.array([m, b]))
        heapq.heappush(heap, (-(e2[0] - fl2[0]), a, m, v2[0], e2[0], fl2[0]))
        heapq.heappush(heap, (-(e2[1] - fl2[1]), m, b, v2[1], e2[1], fl2[1]))
        total += v2[0] + v2[1] - v
        err_total += e2[0] + e2[1] - e
        floor_total += fl2[0] + fl2[1] - fl
        if err_total < best[1]:
            best = (total, err_total)

    if err_total <= best[1]:
        best = (math.fsum(item[3] for item in heap), err_total)
    # the smallest bound seen is reported, so a larger budget never reports
    # a worse result
    if full_output:
        return best
    return best[0]
