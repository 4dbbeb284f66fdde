"""Distribution functions for the t and standard normal laws.

The regularized incomplete beta uses the modified Lentz continued fraction;
callers pass both ``x`` and ``1 - x`` so the complement never has to be
formed by subtraction.
"""

from __future__ import annotations

import math
from statistics import NormalDist

_TINY = 1e-300
_EPS = 1e-16
_MAX_ITER = 20_000
_STD_NORMAL = NormalDist()


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge (a={a}, b={b}, x={x})")


def _stirling_tail(a: float) -> float:
    """lgamma(a) minus its Stirling leading terms, for a >= 30."""
    a2 = a * a
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * a2)) / a2) / a2) / a


def _lgamma_ratio(a: float, b: float) -> float:
    """log(Gamma(a + b) / Gamma(a)) without cancellation for large ``a``."""
    if a < 30.0:
        return math.lgamma(a + b) - math.lgamma(a)
    ab = a + b
    return (
        (a - 0.5) * math.log1p(b / a)
        + b * math.log(ab)
        - b
        + _stirling_tail(ab)
        - _stirling_tail(a)
    )


def _log_inv_beta(a: float, b: float) -> float:
    """log(1 / B(a, b)) = lgamma(a+b) - lgamma(a) - lgamma(b)."""
    if a < b:
        a, b = b, a
    return _lgamma_ratio(a, b) - math.lgamma(b)


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta ``I_x(a, b)``; ``y`` is ``1 - x`` if known exactly."""
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = _log_inv_beta(a, b) + a * math.log(x) + b * math.log(y)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, y) / b


def betainc_upper(a: float, b: float, x: float, y: float | None = None) -> float:
    """``1 - I_x(a, b)`` without cancellation in the upper tail."""
    if y is None:
        y = 1.0 - x
    return betainc(b, a, y, x)


def t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(df):
        return normal_sf(t)
    if t == 0.0:
        return 0.5
    t2 = t * t
    x = df / (df + t2)
    y = t2 / (df + t2)
    tail = 0.5 * betainc(0.5 * df, 0.5, x, y)
    return tail if t > 0 else 1.0 - tail


def t_cdf(t: float, df: float) -> float:
    return t_sf(-t, df)


def t_pdf(t: float, df: float) -> float:
    log_norm = _lgamma_ratio(0.5 * df, 0.5) - 0.5 * math.log(df * math.pi)
    return math.exp(log_norm - 0.5 * (df + 1) * math.log1p(t * t / df))


def t_ppf(p: float, df: float) -> float:
    """Quantile of Student's t; Newton iteration on the tail probability."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_ppf(1.0 - p, df)
    tail = 1.0 - p
    # The normal quantile sits below the t quantile, and the t CDF is concave
    # on the positive axis, so Newton steps increase monotonically to the root.
    x = _STD_NORMAL.inv_cdf(p)
    for _ in range(500):
        step = (t_sf(x, df) - tail) / t_pdf(x, df)
        x += step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_ppf(p: float) -> float:
    return _STD_NORMAL.inv_cdf(p)
