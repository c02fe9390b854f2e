"""Oracle-equivalence and invariant checks for a single parameter point.

Used by ``geoabsorb validate``.  Every check records the observed
discrepancy next to the tolerance it was held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import (
    characteristic_roots_1d,
    expected_visits_1d,
    expected_visits_two_level,
    quartic,
    summed_visits,
    total_expected_visits,
    two_level_spectrum,
)
from .models import (
    LatticeState,
    Model,
    TwoLevelModel,
    Walk1DModel,
    WalkNDModel,
    origin,
    recurrence_residual,
    survival_factor,
)
from .oracles import run_walks, truncated_fixed_point, uniqueness_convergence_report, window_states
from .quadrature import QuadratureConfig, default_config, expected_visits_nd_many, omega_last

__all__ = ["Check", "validate_model"]

_WALKS = {"quick": 100_000, "full": 1_000_000}
_MAX_RADIUS = {1: 5000, 2: 120, 3: 40, 4: 14}


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<44s} observed={self.observed:.3e}  tol={self.tolerance:.1e}"


def _upto(name: str, observed: float, tol: float) -> Check:
    return Check(name, float(observed), tol, bool(observed < tol))


def _decay_rate(model: Model) -> float:
    """Slowest spatial decay rate of the exact solution."""
    if isinstance(model, Walk1DModel):
        r = characteristic_roots_1d(model)
        return -math.log(max(r.xi2, 1.0 / r.xi1))
    if isinstance(model, TwoLevelModel):
        return -math.log(two_level_spectrum(model).mu2)
    return omega_last(model, [0.0] * (model.n - 1))


def _radius(model: Model, target: float, scale: float) -> int:
    d = 2 if isinstance(model, TwoLevelModel) else getattr(model, "n", 1)
    r = math.ceil(math.log(scale / target) / _decay_rate(model)) + 2
    return max(2, min(r, _MAX_RADIUS[min(d, 4)]))


def _mc_checks(model: Model, walks: int, seed: int) -> list[Check]:
    o = origin(model)
    row = o.coords + (() if o.level is None else (o.level,))
    stats = run_walks(model, walks, seed, row, row)
    exact = _exact(model, [o])[0]
    beta = survival_factor(model)
    out = []
    for label, est, ref in [
        ("mc visits at origin (in std errors)", stats.visits[0], exact),
        ("mc absorption at origin (in std errors)", stats.absorption[0], (1 - beta) * exact),
        ("mc lifetime 1/(1-beta) (in std errors)", stats.lifetime, 1 / (1 - beta)),
    ]:
        z = abs(est.mean - ref) / est.std_error if est.std_error > 0 else math.inf
        out.append(_upto(label, z, 4.0))
    return out


def _exact(model: Model, states) -> np.ndarray:
    if isinstance(model, Walk1DModel):
        return np.array([expected_visits_1d(model, s.coords[0]) for s in states])
    if isinstance(model, TwoLevelModel):
        return np.array([expected_visits_two_level(model, s.level, s.coords[0]) for s in states])
    need = max(8 * (max(abs(c) for c in s.coords) + 1) + 16 for s in states)
    config = QuadratureConfig(max(default_config(model.n).nodes_per_axis, need))
    return expected_visits_nd_many(model, states, config)


def validate_model(model: Model, profile: str = "quick", seed: int = 20240601) -> list[Check]:
    if profile not in _WALKS:
        raise ValueError(f"unknown profile {profile!r}")
    full = profile == "full"
    checks: list[Check] = []
    scale = total_expected_visits(model)

    checks.append(
        _upto("mass: summed solution vs 1/(1-beta)", abs(summed_visits(model) - scale) / scale, 1e-10)
    )

    if isinstance(model, Walk1DModel):
        r = characteristic_roots_1d(model)
        checks.append(_upto("roots: xi1*xi2 - p/q", abs(r.xi1 * r.xi2 - model.p / model.q), 1e-12 * max(1, model.p / model.q)))
        checks.append(_upto("roots: xi1+xi2 - 1/(q alpha)", abs(r.xi1 + r.xi2 - 1 / (model.q * model.alpha)), 1e-12 * r.xi1))
        window = [LatticeState((n,)) for n in range(-50, 51)]
        compare = [LatticeState((n,)) for n in range(-20, 21)]
        oracle_tol = 1e-10
    elif isinstance(model, TwoLevelModel):
        s = two_level_spectrum(model)
        q = max(abs(quartic(m, model.alpha)) for m in (s.mu1, s.mu2, s.mu3, s.mu4))
        checks.append(_upto("spectrum: quartic residual", q, 1e-10))
        window = [LatticeState((n,), lvl) for lvl in (0, 1) for n in range(-50, 51)]
        compare = [LatticeState((n,), lvl) for lvl in (0, 1) for n in range(-20, 21)]
        oracle_tol = 1e-10
    else:
        window = window_states(model, 5 if full else 2)
        compare = window_states(model, 3 if full else 2)
        oracle_tol = 1e-6

    # recurrence residuals by direct substitution
    halo = {}
    if isinstance(model, WalkNDModel):
        radius = max(max(abs(c) for c in s.coords) for s in window) + 1
        ball = window_states(model, radius)
        halo = dict(zip(ball, _exact(model, ball)))
        visits = halo
    elif isinstance(model, Walk1DModel):
        visits = lambda st: expected_visits_1d(model, st.coords[0])  # noqa: E731
    else:
        visits = lambda st: expected_visits_two_level(model, st.level, st.coords[0])  # noqa: E731
    res = max(abs(recurrence_residual(model, visits, st)) for st in window)
    checks.append(_upto("recurrence residual (direct substitution)", res / scale, 1e-8))

    # truncated-lattice oracle
    radius = _radius(model, 1e-13 if oracle_tol < 1e-8 else 1e-9, scale)
    sol = truncated_fixed_point(model, radius, tol=1e-12 * scale)
    exact = _exact(model, compare)
    gap = max(abs(sol[st] - v) for st, v in zip(compare, exact))
    checks.append(_upto(f"closed form vs truncated lattice (R={radius})", gap, oracle_tol))

    if isinstance(model, WalkNDModel):
        states = window_states(model, 3)
        base = default_config(model.n).nodes_per_axis
        a = expected_visits_nd_many(model, states, QuadratureConfig(base))
        b = expected_visits_nd_many(model, states, QuadratureConfig(2 * base))
        checks.append(_upto("quadrature node doubling", float(np.max(np.abs(a - b))), 1e-8))

    # convergence of truncations with growing radius
    rate = _decay_rate(model)
    d = getattr(model, "n", 1)
    cap = _MAX_RADIUS[min(d, 4)]
    radii = sorted({min(cap, math.ceil(k / rate)) for k in (10, 20, 30)})
    if len(radii) >= 2:
        rep = uniqueness_convergence_report(model, radii, tol=1e-14 * scale)
        checks.append(Check("truncation gaps strictly decreasing", rep.final, 1e-8, rep.decreasing))
        checks.append(_upto(f"final truncation gap (radii {radii})", rep.final, 1e-8))

    checks.extend(_mc_checks(model, _WALKS[profile], seed))
    return checks
