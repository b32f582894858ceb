"""Pearson chi-square goodness of fit with a self-contained p-value."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

_EPS = 1e-15
_MAX_ITER = 10_000
_TINY = 1e-300


def _lower_series(a: float, x: float) -> float:
    # P(a, x) by the power series; converges fast for x < a + 1.
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_fraction(a: float, x: float) -> float:
    # Q(a, x) by the Legendre continued fraction, modified Lentz evaluation.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x) = Gamma(a, x) / Gamma(a)``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _lower_series(a, x))
    return _upper_fraction(a, x)


def chi_square_sf(statistic: float, dof: int) -> float:
    """Survival function of the chi-square distribution.

    With zero degrees of freedom there is nothing to test and the p-value is 1.
    """
    if dof < 0:
        raise ValueError("degrees of freedom must be non-negative")
    if dof == 0:
        return 1.0
    return regularized_gamma_q(dof / 2.0, statistic / 2.0)


def chi_square_uniform(observed: Sequence[int], cells: int | None = None) -> tuple[float, int, float]:
    """Statistic, degrees of freedom and p-value against the uniform law.

    ``cells`` may exceed ``len(observed)``; missing cells count as zero.
    """
    observed = [int(o) for o in observed]
    if cells is None:
        cells = len(observed)
    if cells < len(observed) or cells < 1:
        raise ValueError("need at least as many cells as observations listed")
    total = sum(observed)
    if total <= 0:
        raise ValueError("no observations")
    # sum((o - e)^2 / e) with e = total / cells, evaluated exactly.
    stat = float(Fraction(cells * sum(o * o for o in observed), total) - total)
    dof = cells - 1
    return stat, dof, chi_square_sf(stat, dof)
