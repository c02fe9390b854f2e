"""Walk models with geometric absorption.

Each model multiplies the transition probabilities of an ordinary lattice
walk by a survival factor ``beta`` and absorbs the walker in place with
probability ``1 - beta``.  Three models are supported:

* :class:`Walk1DModel` -- asymmetric nearest-neighbour walk on Z,
* :class:`WalkNDModel` -- symmetric nearest-neighbour walk on Z^n, n >= 2,
* :class:`TwoLevelModel` -- walk on Z x {0, 1} with left, right and
  cross-level moves.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, EvaluationError

__all__ = [
    "Walk1DModel",
    "WalkNDModel",
    "TwoLevelModel",
    "Model",
    "LatticeState",
    "VisitFunction",
    "make_walk_1d",
    "make_walk_nd",
    "make_two_level",
    "survival_factor",
    "dimension",
    "origin",
    "neighbors",
    "recurrence_residual",
]

MAX_DIMENSION = 4


def _check_real(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Walk1DModel:
    """Asymmetric walk on Z: step +1 w.p. ``p*alpha``, -1 w.p. ``q*alpha``."""

    p: float
    q: float
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0 and 0.0 < self.q < 1.0):
            raise DomainError(f"need 0 < p, q < 1, got p={self.p}, q={self.q}")
        if abs(self.p + self.q - 1.0) > 1e-12:
            raise DomainError(f"p + q must equal 1, got {self.p + self.q!r}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"need 0 < alpha < 1, got {self.alpha}")

    kind = "1d"

    @property
    def params(self) -> dict[str, float]:
        return {"p": self.p, "alpha": self.alpha}


@dataclass(frozen=True)
class WalkNDModel:
    """Symmetric walk on Z^n stepping along each of the 2n directions w.p. ``alpha``."""

    n: int
    alpha: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 2:
            raise DomainError(
                f"dimension must be an integer >= 2, got {self.n!r}; "
                "use Walk1DModel with p = 0.5 for one dimension"
            )
        if not 0.0 < self.alpha < 1.0 / (2 * self.n):
            raise DomainError(f"need 0 < alpha < 1/(2n) = {1 / (2 * self.n)}, got {self.alpha}")

    kind = "nd"

    @property
    def params(self) -> dict[str, float]:
        return {"dim": self.n, "alpha": self.alpha}


@dataclass(frozen=True)
class TwoLevelModel:
    """Walk on Z x {0, 1}; left, right and level-switch each w.p. ``alpha``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0 / 3.0:
            raise DomainError(f"need 0 < alpha < 1/3, got {self.alpha}")

    kind = "twolevel"

    @property
    def params(self) -> dict[str, float]:
        return {"alpha": self.alpha}


Model = Union[Walk1DModel, WalkNDModel, TwoLevelModel]


@dataclass(frozen=True, order=True)
class LatticeState:
    """Integer lattice coordinates, plus a level index for the two-level walk."""

    coords: tuple[int, ...]
    level: int | None = None

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not coords:
            raise DomainError("a lattice state needs at least one coordinate")
        object.__setattr__(self, "coords", coords)
        if self.level is not None:
            if self.level not in (0, 1):
                raise DomainError(f"level must be 0 or 1, got {self.level!r}")
            if len(coords) != 1:
                raise DomainError("two-level states have exactly one coordinate")
            object.__setattr__(self, "level", int(self.level))

    @classmethod
    def of(cls, *coords: int, level: int | None = None) -> "LatticeState":
        return cls(tuple(coords), level)

    def __str__(self) -> str:
        text = ",".join(str(c) for c in self.coords)
        return text if self.level is None else f"{text}@{self.level}"


# A visit function maps states to expected visit counts.  Mappings are
# accepted as well as callables; a missing key is an evaluation failure.
VisitFunction = Union[Callable[[LatticeState], float], Mapping[LatticeState, float]]


def make_walk_1d(p: float, alpha: float) -> Walk1DModel:
    """Build a validated 1-D walk; ``q`` is derived as ``1 - p``."""
    p = _check_real("p", p)
    alpha = _check_real("alpha", alpha)
    if not 0.0 < p < 1.0:
        raise DomainError(f"need 0 < p < 1 (pq > 0), got p={p}")
    return Walk1DModel(p=p, q=1.0 - p, alpha=alpha)


def make_walk_nd(n: int, alpha: float) -> WalkNDModel:
    """Build a validated symmetric n-dimensional walk (n >= 2)."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"dimension must be an integer, got {n!r}")
    return WalkNDModel(n=int(n), alpha=_check_real("alpha", alpha))


def make_two_level(alpha: float) -> TwoLevelModel:
    """Build a validated two-level walk."""
    return TwoLevelModel(alpha=_check_real("alpha", alpha))


def survival_factor(model: Model) -> float:
    """Per-step probability of not being absorbed: alpha, 2n*alpha or 3*alpha."""
    if isinstance(model, Walk1DModel):
        return model.alpha
    if isinstance(model, WalkNDModel):
        return 2 * model.n * model.alpha
    if isinstance(model, TwoLevelModel):
        return 3 * model.alpha
    raise TypeError(f"not a walk model: {model!r}")


def dimension(model: Model) -> int:
    """Number of integer coordinates of a state of ``model``."""
    return model.n if isinstance(model, WalkNDModel) else 1


def origin(model: Model) -> LatticeState:
    """Starting state of every walk (level 0 for the two-level model)."""
    if isinstance(model, TwoLevelModel):
        return LatticeState((0,), 0)
    return LatticeState((0,) * dimension(model))


def check_state(model: Model, state: LatticeState) -> None:
    """Raise DomainError unless ``state`` belongs to the lattice of ``model``."""
    if len(state.coords) != dimension(model):
        raise DomainError(
            f"state {state} has {len(state.coords)} coordinates, model needs {dimension(model)}"
        )
    two_level = isinstance(model, TwoLevelModel)
    if two_level != (state.level is not None):
        raise DomainError(f"state {state}: level index required iff the model is two-level")


def neighbors(model: Model, state: LatticeState) -> list[tuple[float, LatticeState]]:
    """States feeding ``state`` in one step, with their transition probabilities.

    All three kernels are translation invariant, so the probability of
    arriving at ``state`` from a neighbour equals the probability of the
    move that leads there.
    """
    check_state(model, state)
    if isinstance(model, Walk1DModel):
        (x,) = state.coords
        # arriving from x-1 needs a forward step, from x+1 a backward step
        return [
            (model.p * model.alpha, LatticeState((x - 1,))),
            (model.q * model.alpha, LatticeState((x + 1,))),
        ]
    if isinstance(model, WalkNDModel):
        out = []
        for k in range(model.n):
            for sign in (-1, 1):
                c = list(state.coords)
                c[k] += sign
                out.append((model.alpha, LatticeState(tuple(c))))
        return out
    (x,) = state.coords
    lvl = state.level
    return [
        (model.alpha, LatticeState((x - 1,), lvl)),
        (model.alpha, LatticeState((x + 1,), lvl)),
        (model.alpha, LatticeState((x,), 1 - lvl)),
    ]


def _evaluate(visits: VisitFunction, state: LatticeState) -> float:
    try:
        value = visits[state] if isinstance(visits, Mapping) else visits(state)
    except (KeyError, IndexError, LookupError) as exc:
        raise EvaluationError(f"visit function undefined at {state}") from exc
    if value is None:
        raise EvaluationError(f"visit function undefined at {state}")
    return float(value)


def recurrence_residual(model: Model, visits: VisitFunction, state: LatticeState) -> float:
    """Left side minus right side of the model's difference equation at ``state``.

    The equation is ``X_s = delta(s, origin) + sum_{s'} P(s' -> s) X_{s'}``;
    an exact solution has residual zero everywhere.
    """
    delta = 1.0 if state == origin(model) else 0.0
    rhs = delta
    for prob, nb in neighbors(model, state):
        rhs += prob * _evaluate(visits, nb)
    return _evaluate(visits, state) - rhs
