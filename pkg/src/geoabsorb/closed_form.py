"""Exact expected-visit counts for the 1-D and two-level walks.

Both walks reduce to linear recurrences with constant coefficients.  The
bounded solution keeps only the characteristic roots inside the unit
interval on each side of the origin, so visits decay geometrically:

    1-D:        X_n = C * xi2**n   (n >= 0),   C * xi1**n   (n <= 0)
    two-level:  f_n = b * mu2**|n| + d * mu4**|n|
                g_n = b * mu2**|n| - d * mu4**|n|
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .models import Model, TwoLevelModel, Walk1DModel, WalkNDModel, survival_factor

__all__ = [
    "Roots1D",
    "TwoLevelSpectrum",
    "characteristic_roots_1d",
    "expected_visits_1d",
    "absorption_prob_1d",
    "two_level_spectrum",
    "expected_visits_two_level",
    "absorption_prob_two_level",
    "total_expected_visits",
    "summed_visits",
    "quartic",
]


@dataclass(frozen=True)
class Roots1D:
    """Roots of ``q*alpha*xi**2 - xi + p*alpha = 0`` and the common amplitude."""

    xi1: float
    xi2: float
    c: float


@dataclass(frozen=True)
class TwoLevelSpectrum:
    mu1: float
    mu2: float
    mu3: float
    mu4: float
    b: float
    d: float


def characteristic_roots_1d(model: Walk1DModel) -> Roots1D:
    p, q, a = model.p, model.q, model.alpha
    root = math.sqrt(1.0 - 4.0 * p * q * a * a)
    # xi2 in the cancellation-free form 2*p*a / (1 + root)
    xi1 = (1.0 + root) / (2.0 * q * a)
    xi2 = 2.0 * p * a / (1.0 + root)
    return Roots1D(xi1=xi1, xi2=xi2, c=1.0 / root)


def expected_visits_1d(model: Walk1DModel, n: int) -> float:
    """Expected visits to site ``n`` of a walk started at 0.

    Large ``|n|`` underflows to 0.0, which is the correct limit.
    """
    p, q, a = model.p, model.q, model.alpha
    root = math.sqrt(1.0 - 4.0 * p * q * a * a)
    n = int(n)
    # decay ratios xi2 and 1/xi1 share one formula so p = q gives X_n = X_-n exactly
    if n >= 0:
        return (2.0 * p * a / (1.0 + root)) ** n / root
    return (2.0 * q * a / (1.0 + root)) ** (-n) / root


def absorption_prob_1d(model: Walk1DModel, n: int) -> float:
    return (1.0 - model.alpha) * expected_visits_1d(model, n)


def quartic(mu: float, alpha: float) -> float:
    """Characteristic polynomial of the two-level recurrence, in factored form."""
    return (mu * mu + (1.0 - 1.0 / alpha) * mu + 1.0) * (mu * mu - (1.0 + 1.0 / alpha) * mu + 1.0)


def two_level_spectrum(model: TwoLevelModel) -> TwoLevelSpectrum:
    a = model.alpha
    r12 = math.sqrt((1.0 + a) * (1.0 - 3.0 * a))
    r34 = math.sqrt((1.0 - a) * (1.0 + 3.0 * a))
    mu1 = (1.0 - a + r12) / (2.0 * a)
    mu3 = (1.0 + a + r34) / (2.0 * a)
    # small roots as reciprocals: each quadratic factor has constant term 1
    spec = TwoLevelSpectrum(
        mu1=mu1,
        mu2=1.0 / mu1,
        mu3=mu3,
        mu4=1.0 / mu3,
        b=1.0 / (2.0 * r12),
        d=1.0 / (2.0 * r34),
    )
    if not (spec.b > spec.d and spec.mu2 > spec.mu4):
        raise AssertionError(f"level-1 visits would not be positive for alpha={a}")
    return spec


def _check_level(level: int) -> None:
    if level not in (0, 1):
        raise DomainError(f"level must be 0 or 1, got {level!r}")


def expected_visits_two_level(model: TwoLevelModel, level: int, n: int) -> float:
    """Expected visits to site ``n`` on ``level`` (the walk starts at 0 on level 0)."""
    _check_level(level)
    s = two_level_spectrum(model)
    m = abs(int(n))
    even = s.b * s.mu2**m
    odd = s.d * s.mu4**m
    return even + odd if level == 0 else even - odd


def absorption_prob_two_level(model: TwoLevelModel, level: int, n: int) -> float:
    return (1.0 - 3.0 * model.alpha) * expected_visits_two_level(model, level, n)


def total_expected_visits(model: Model) -> float:
    """Expected lifetime ``1 / (1 - beta)`` of a walk, counting time 0."""
    return 1.0 / (1.0 - survival_factor(model))


def summed_visits(model: Model) -> float:
    """Sum of the exact solution over the whole lattice, tails summed in closed form.

    Unlike :func:`total_expected_visits` this goes through the roots and
    amplitudes (or, for the n-dimensional walk, the integral
    representation), so agreement of the two is a mass-conservation check.
    """
    if isinstance(model, Walk1DModel):
        r = characteristic_roots_1d(model)
        right = r.xi2 / (1.0 - r.xi2)
        left = (1.0 / r.xi1) / (1.0 - 1.0 / r.xi1)
        return r.c * (1.0 + right + left)
    if isinstance(model, TwoLevelModel):
        s = two_level_spectrum(model)
        # d-terms cancel between the two levels
        return 2.0 * s.b * (1.0 + s.mu2) / (1.0 - s.mu2)
    if isinstance(model, WalkNDModel):
        from .quadrature import summed_visits_nd

        return summed_visits_nd(model)
    raise TypeError(f"not a walk model: {model!r}")
