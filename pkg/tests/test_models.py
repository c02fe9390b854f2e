import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import alphas_1d, alphas_tl, nd_models, probs
from geoabsorb import (
    DomainError,
    EvaluationError,
    LatticeState,
    TwoLevelModel,
    Walk1DModel,
    expected_visits_1d,
    expected_visits_two_level,
    make_two_level,
    make_walk_1d,
    make_walk_nd,
    recurrence_residual,
    survival_factor,
)
from geoabsorb.models import neighbors, origin


def test_make_walk_1d_symmetric():
    m = make_walk_1d(0.5, 0.5)
    assert (m.p, m.q, m.alpha) == (0.5, 0.5, 0.5)


def test_make_walk_1d_derives_q():
    m = make_walk_1d(0.7, 0.8)
    assert m.q == pytest.approx(0.3, abs=1e-15)
    assert m.p + m.q == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p, alpha", [(1.0, 0.5), (0.0, 0.5), (0.5, 0.0), (0.5, 1.0), (0.5, float("nan"))])
def test_make_walk_1d_rejects(p, alpha):
    with pytest.raises(DomainError):
        make_walk_1d(p, alpha)


def test_direct_1d_construction_checks_sum():
    with pytest.raises(DomainError):
        Walk1DModel(p=0.6, q=0.6, alpha=0.5)


@pytest.mark.parametrize("n, alpha", [(2, 0.2), (3, 0.1)])
def test_make_walk_nd(n, alpha):
    m = make_walk_nd(n, alpha)
    assert (m.n, m.alpha) == (n, alpha)


@pytest.mark.parametrize("n, alpha", [(2, 0.25), (1, 0.1), (3, 1 / 6), (2, 0.0), (2.5, 0.1)])
def test_make_walk_nd_rejects(n, alpha):
    with pytest.raises(DomainError):
        make_walk_nd(n, alpha)


def test_make_two_level():
    assert make_two_level(0.2).alpha == 0.2
    for bad in (1 / 3, 0.0, -0.1):
        with pytest.raises(DomainError):
            make_two_level(bad)


def test_survival_factor_per_model():
    assert survival_factor(make_walk_1d(0.5, 0.5)) == 0.5
    assert survival_factor(make_walk_nd(2, 0.2)) == pytest.approx(0.8)
    assert survival_factor(make_two_level(0.2)) == pytest.approx(0.6)


@given(probs, alphas_1d)
def test_survival_factor_in_unit_interval_1d(p, a):
    beta = survival_factor(make_walk_1d(p, a))
    assert 0 < beta < 1


@given(nd_models(dims=(2, 3, 4)))
def test_survival_factor_in_unit_interval_nd(m):
    assert 0 < survival_factor(m) < 1


@given(alphas_tl)
def test_kernel_probabilities_sum_to_one(a):
    m = make_two_level(a)
    moves = sum(p for p, _ in neighbors(m, origin(m)))
    assert moves + (1 - survival_factor(m)) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_two_level_rejects_out_of_range(a):
    if 0 < a < 1 / 3:
        assert isinstance(make_two_level(a), TwoLevelModel)
    else:
        with pytest.raises(DomainError):
            make_two_level(a)


@given(st.integers(2, 6), st.floats(allow_nan=False, allow_infinity=False))
def test_nd_rejects_out_of_range(n, a):
    if 0 < a < 1 / (2 * n):
        make_walk_nd(n, a)
    else:
        with pytest.raises(DomainError):
            make_walk_nd(n, a)


def test_lattice_state_validation():
    assert LatticeState.of(1, -2) == LatticeState((1, -2))
    with pytest.raises(DomainError):
        LatticeState((0, 0), level=0)
    with pytest.raises(DomainError):
        LatticeState((0,), level=2)
    with pytest.raises(DomainError):
        recurrence_residual(make_two_level(0.2), lambda s: 1.0, LatticeState((0,)))


def test_residual_exact_1d():
    m = make_walk_1d(0.5, 0.5)
    r = recurrence_residual(m, lambda s: expected_visits_1d(m, s.coords[0]), LatticeState((3,)))
    assert abs(r) < 1e-12


def test_residual_constant_function():
    m = make_walk_1d(0.5, 0.5)
    assert recurrence_residual(m, lambda s: 1.0, LatticeState((0,))) == pytest.approx(-0.5, abs=1e-15)


def test_residual_exact_two_level_level1():
    m = make_two_level(0.2)
    f = lambda s: expected_visits_two_level(m, s.level, s.coords[0])  # noqa: E731
    assert abs(recurrence_residual(m, f, LatticeState((1,), 1))) < 1e-12


def test_residual_missing_neighbour():
    m = make_walk_1d(0.5, 0.5)
    table = {LatticeState((0,)): 1.0, LatticeState((1,)): 0.5}
    with pytest.raises(EvaluationError):
        recurrence_residual(m, table, LatticeState((0,)))


@given(
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.integers(-4, 4),
    st.integers(0, 2**32),
)
def test_residual_affine_in_visits(a, b, x, salt):
    # r(aX + bY) = a r(X) + b r(Y) + (a + b - 1) delta(s, 0)
    m = make_walk_1d(0.3, 0.9)
    X = lambda s: math.sin(s.coords[0] + salt % 7)  # noqa: E731
    Y = lambda s: math.cos(0.3 * s.coords[0] * (1 + salt % 3))  # noqa: E731
    Z = lambda s: a * X(s) + b * Y(s)  # noqa: E731
    s = LatticeState((x,))
    delta = 1.0 if x == 0 else 0.0
    lhs = recurrence_residual(m, Z, s)
    rhs = a * recurrence_residual(m, X, s) + b * recurrence_residual(m, Y, s) + (a + b - 1) * delta
    assert lhs == pytest.approx(rhs, abs=1e-12)
