import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import B_TL, C_1D, D_TL, F0, F1, G0, MU2, MU4, X0_SYM, XI1, XI2, alphas_1d, alphas_tl, probs
from geoabsorb import (
    LatticeState,
    absorption_prob_1d,
    absorption_prob_two_level,
    characteristic_roots_1d,
    expected_visits_1d,
    expected_visits_two_level,
    make_two_level,
    make_walk_1d,
    make_walk_nd,
    recurrence_residual,
    summed_visits,
    total_expected_visits,
    truncated_fixed_point,
    two_level_spectrum,
)
from geoabsorb.closed_form import quartic


def central_binomial_series(x: float, terms: int = 200) -> float:
    total, term = 0.0, 1.0
    for k in range(terms):
        total += term
        term *= x * (2 * k + 1) * (2 * k + 2) / ((k + 1) ** 2)
    return total


def test_roots_exact_surds():
    r = characteristic_roots_1d(make_walk_1d(0.7, 0.8))
    assert r.xi1 == pytest.approx(XI1, abs=1e-12)
    assert r.xi2 == pytest.approx(XI2, abs=1e-12)
    assert r.c == pytest.approx(C_1D, abs=1e-12)


def test_symmetric_origin_matches_series():
    m = make_walk_1d(0.5, 0.5)
    r = characteristic_roots_1d(m)
    assert r.xi1 == pytest.approx(2 + math.sqrt(3), abs=1e-12)
    assert r.xi2 == pytest.approx(2 - math.sqrt(3), abs=1e-12)
    series = central_binomial_series(m.p * m.q * m.alpha**2)
    assert expected_visits_1d(m, 0) == pytest.approx(series, abs=1e-12)
    assert series == pytest.approx(X0_SYM, abs=1e-12)


@given(probs, alphas_1d)
def test_roots_vieta(p, a):
    m = make_walk_1d(p, a)
    r = characteristic_roots_1d(m)
    assert r.xi1 > 1 and 0 < r.xi2 < 1 and r.c > 0
    assert r.xi1 * r.xi2 == pytest.approx(m.p / m.q, rel=1e-12)
    assert r.xi1 + r.xi2 == pytest.approx(1 / (m.q * m.alpha), rel=1e-12)


@pytest.mark.parametrize(
    "n, expected", [(0, 25 / 17), (1, 25 / 17 * 2 / 3), (-1, 25 / 17 / 3.5)]
)
def test_expected_visits_1d_values(n, expected):
    assert expected_visits_1d(make_walk_1d(0.7, 0.8), n) == pytest.approx(expected, abs=1e-12)


def test_expected_visits_1d_against_truncated_oracle():
    m = make_walk_1d(0.7, 0.8)
    sol = truncated_fixed_point(m, 200, tol=1e-12)
    for n in (-1, 0, 1):
        assert expected_visits_1d(m, n) == pytest.approx(sol[LatticeState((n,))], abs=1e-10)


def test_absorption_1d():
    assert absorption_prob_1d(make_walk_1d(0.7, 0.8), 0) == pytest.approx(0.2 * C_1D, abs=1e-12)
    assert absorption_prob_1d(make_walk_1d(0.5, 0.5), 0) == pytest.approx(0.5 * X0_SYM, abs=1e-12)


def test_underflow_is_zero():
    m = make_walk_1d(0.5, 0.5)
    assert expected_visits_1d(m, 100_000) == 0.0
    assert expected_visits_1d(m, -100_000) == 0.0


def test_total_expected_visits():
    assert total_expected_visits(make_walk_1d(0.7, 0.8)) == pytest.approx(5.0)
    assert total_expected_visits(make_walk_nd(2, 0.2)) == pytest.approx(5.0)
    assert total_expected_visits(make_two_level(0.2)) == pytest.approx(2.5)


@given(probs, alphas_1d)
def test_mass_1d(p, a):
    m = make_walk_1d(p, a)
    assert summed_visits(m) == pytest.approx(1 / (1 - a), rel=1e-10)


@given(alphas_tl)
def test_mass_two_level(a):
    m = make_two_level(a)
    assert summed_visits(m) == pytest.approx(1 / (1 - 3 * a), rel=1e-10)


def test_mass_by_direct_summation():
    m = make_walk_1d(0.7, 0.8)
    assert math.fsum(absorption_prob_1d(m, n) for n in range(-200, 201)) == pytest.approx(1.0, abs=1e-12)
    t = make_two_level(0.2)
    total = math.fsum(absorption_prob_two_level(t, lvl, n) for lvl in (0, 1) for n in range(-100, 101))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_two_level_spectrum_values():
    s = two_level_spectrum(make_two_level(0.2))
    assert s.mu2 == pytest.approx(MU2, abs=1e-12)
    assert s.mu4 == pytest.approx(MU4, abs=1e-12)
    assert s.b == pytest.approx(B_TL, abs=1e-12)
    assert s.d == pytest.approx(D_TL, abs=1e-12)
    assert s.mu1 * s.mu2 == pytest.approx(1, abs=1e-12)
    assert s.mu3 * s.mu4 == pytest.approx(1, abs=1e-12)


@given(alphas_tl)
def test_two_level_spectrum_invariants(a):
    s = two_level_spectrum(make_two_level(a))
    assert s.mu1 > 1 and s.mu3 > 1 and 0 < s.mu2 < 1 and 0 < s.mu4 < 1
    assert s.b > 0 and s.d > 0
    for mu in (s.mu1, s.mu2, s.mu3, s.mu4):
        # scale by mu^4 so the check is meaningful for large roots too
        assert abs(quartic(mu, a)) < 1e-10 * max(1.0, mu**4)


def test_two_level_values():
    m = make_two_level(0.2)
    assert expected_visits_two_level(m, 0, 0) == pytest.approx(F0, abs=1e-12)
    assert expected_visits_two_level(m, 1, 0) == pytest.approx(G0, abs=1e-12)
    assert expected_visits_two_level(m, 1, 0) >= 0.2
    assert expected_visits_two_level(m, 0, 1) == pytest.approx(F1, abs=1e-12)
    assert expected_visits_two_level(m, 0, -1) == expected_visits_two_level(m, 0, 1)
    assert absorption_prob_two_level(m, 0, 0) == pytest.approx(0.4 * F0, abs=1e-12)
    assert absorption_prob_two_level(m, 1, 0) == pytest.approx(0.4 * G0, abs=1e-12)


@given(probs, alphas_1d)
def test_residual_1d(p, a):
    m = make_walk_1d(p, a)
    X = lambda s: expected_visits_1d(m, s.coords[0])  # noqa: E731
    scale = characteristic_roots_1d(m).c
    for n in range(-50, 51):
        assert abs(recurrence_residual(m, X, LatticeState((n,)))) < 1e-12 * scale


@given(alphas_tl)
def test_residual_two_level(a):
    m = make_two_level(a)
    fg = lambda s: expected_visits_two_level(m, s.level, s.coords[0])  # noqa: E731
    for lvl in (0, 1):
        for n in range(-50, 51):
            assert abs(recurrence_residual(m, fg, LatticeState((n,), lvl))) < 1e-12


@given(alphas_1d, st.integers(0, 60))
def test_symmetric_1d_is_even(a, n):
    m = make_walk_1d(0.5, a)
    assert expected_visits_1d(m, n) == expected_visits_1d(m, -n)


@given(alphas_tl, st.integers(0, 60), st.sampled_from([0, 1]))
def test_two_level_is_even(a, n, lvl):
    m = make_two_level(a)
    assert expected_visits_two_level(m, lvl, n) == expected_visits_two_level(m, lvl, -n)


@given(probs, st.floats(0.05, 0.95))
def test_monotone_decay_1d(p, a):
    m = make_walk_1d(p, a)
    right = [expected_visits_1d(m, n) for n in range(0, 30)]
    left = [expected_visits_1d(m, -n) for n in range(0, 30)]
    right = [v for v in right if v > 1e-250]
    left = [v for v in left if v > 1e-250]
    assert all(b < a_ for a_, b in zip(right, right[1:]))
    assert all(b < a_ for a_, b in zip(left, left[1:]))


@pytest.mark.parametrize("p, a", [(0.7, 0.8), (0.5, 0.5), (0.2, 0.6)])
def test_oracle_equivalence_1d(p, a):
    m = make_walk_1d(p, a)
    r = characteristic_roots_1d(m)
    rate = max(r.xi2, 1 / r.xi1)
    radius = math.ceil(math.log(1e-13 / r.c) / math.log(rate))
    sol = truncated_fixed_point(m, radius, tol=1e-12)
    for n in range(-20, 21):
        assert expected_visits_1d(m, n) == pytest.approx(sol[LatticeState((n,))], abs=1e-10)


def test_oracle_equivalence_two_level():
    m = make_two_level(0.1)
    sol = truncated_fixed_point(m, 60, tol=1e-12)
    for lvl in (0, 1):
        for n in range(-20, 21):
            exact = expected_visits_two_level(m, lvl, n)
            assert exact == pytest.approx(sol[LatticeState((n,), lvl)], abs=1e-10)
