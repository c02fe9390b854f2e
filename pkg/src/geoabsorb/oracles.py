"""Independent ground truth: Monte Carlo walks and a truncated-lattice solver.

Monte Carlo
    Walks are simulated in fixed-width blocks.  Block ``j`` of a run with
    seed ``s`` draws from ``Philox(key=(j << 64) | s)``; at step ``t`` the
    block always draws ``BLOCK`` uniforms and walk ``i`` of the block
    consumes number ``t * BLOCK + i``.  A walk's randomness therefore
    depends only on the seed and its global index, and per-block integer
    tallies are merged in block order, so the result is independent of how
    blocks are distributed over worker processes.

Truncated lattice
    The defining linear system ``X = e_0 + P^T X`` restricted to the
    sup-norm ball of radius R, with X = 0 outside, solved by simultaneous
    (Jacobi) updates starting from X = 0.  The update map is a sup-norm
    contraction with factor beta.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, IterationError, SimulationError
from .models import (
    LatticeState,
    Model,
    TwoLevelModel,
    Walk1DModel,
    WalkNDModel,
    check_state,
    dimension,
    origin,
    survival_factor,
)

__all__ = [
    "EstimateWithError",
    "WalkTrajectory",
    "TruncatedSolution",
    "ConvergenceReport",
    "BLOCK",
    "MAX_STEPS",
    "simulate_walk",
    "run_walks",
    "mc_expected_visits",
    "mc_absorption_histogram",
    "window_states",
    "fixed_point_iterates",
    "truncated_fixed_point",
    "uniqueness_convergence_report",
]

BLOCK = 8192
MAX_STEPS = 10**9
_SINGLE_WALK_STREAM = 2**64 - 1
_MASK64 = 2**64 - 1


@dataclass(frozen=True)
class EstimateWithError:
    mean: float
    std_error: float
    samples: int

    def within(self, value: float, k: float) -> bool:
        """True if ``value`` lies within ``k`` standard errors of the mean."""
        return abs(self.mean - value) <= k * self.std_error


@dataclass(frozen=True)
class WalkTrajectory:
    visited: tuple[LatticeState, ...]

    @property
    def absorbed_at(self) -> LatticeState:
        return self.visited[-1]

    def __len__(self) -> int:
        return len(self.visited)


# ---------------------------------------------------------------------------
# kernels
#
# A state is an int64 row; the two-level walk stores (position, level).
# Each kernel is a list of moves with cumulative probability thresholds; a
# uniform draw at or above the last threshold (= beta) absorbs.


def _kernel(model: Model) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(model, Walk1DModel):
        probs = [model.p * model.alpha, model.q * model.alpha]
        moves = [[1], [-1]]
    elif isinstance(model, WalkNDModel):
        probs = [model.alpha] * (2 * model.n)
        moves = []
        for k in range(model.n):
            for sign in (1, -1):
                step = [0] * model.n
                step[k] = sign
                moves.append(step)
    elif isinstance(model, TwoLevelModel):
        probs = [model.alpha] * 3
        # level column is reduced mod 2 after the step
        moves = [[1, 0], [-1, 0], [0, 1]]
    else:
        raise TypeError(f"not a walk model: {model!r}")
    thresholds = np.cumsum(probs)
    thresholds[-1] = survival_factor(model)
    return thresholds, np.array(moves, dtype=np.int64)


def _width(model: Model) -> int:
    return 2 if isinstance(model, TwoLevelModel) else dimension(model)


def _to_row(model: Model, state: LatticeState) -> tuple[int, ...]:
    check_state(model, state)
    if state.level is None:
        return state.coords
    return state.coords + (state.level,)


def _to_state(model: Model, row) -> LatticeState:
    row = tuple(int(v) for v in row)
    if isinstance(model, TwoLevelModel):
        return LatticeState(row[:1], row[1])
    return LatticeState(row)


def _step(model: Model, pos: np.ndarray, choice: np.ndarray, moves: np.ndarray) -> np.ndarray:
    new = pos + moves[choice]
    if isinstance(model, TwoLevelModel):
        new[:, 1] %= 2
    return new


def simulate_walk(model: Model, seed: int) -> WalkTrajectory:
    """One trajectory from the origin until absorption, fully determined by ``seed``."""
    thresholds, moves = _kernel(model)
    rng = np.random.Generator(np.random.Philox(key=(_SINGLE_WALK_STREAM << 64) | (seed & _MASK64)))
    pos = np.array([_to_row(model, origin(model))], dtype=np.int64)
    visited = [origin(model)]
    steps = 0
    while True:
        u = rng.random()
        choice = int(np.searchsorted(thresholds, u, side="right"))
        if choice == len(moves):
            return WalkTrajectory(tuple(visited))
        steps += 1
        if steps >= MAX_STEPS:
            raise SimulationError(f"walk exceeded {MAX_STEPS} steps (seed {seed})")
        pos = _step(model, pos, np.array([choice]), moves)
        visited.append(_to_state(model, pos[0]))


# ---------------------------------------------------------------------------
# batched Monte Carlo


@dataclass(frozen=True)
class _Box:
    """Axis-aligned box of tracked states, in internal row coordinates."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def index(self, pos: np.ndarray) -> np.ndarray:
        """Flat box index of each row, -1 outside the box."""
        lo = np.array(self.lo)
        hi = np.array(self.hi)
        inside = np.all((pos >= lo) & (pos <= hi), axis=1)
        idx = np.full(len(pos), -1, dtype=np.int64)
        if inside.any():
            idx[inside] = np.ravel_multi_index(tuple((pos[inside] - lo).T), self.shape)
        return idx

    def rows(self) -> list[tuple[int, ...]]:
        ranges = [range(l, h + 1) for l, h in zip(self.lo, self.hi)]
        return list(itertools.product(*ranges))


@dataclass
class _Tally:
    """Exact integer tallies over a set of walks."""

    walks: int
    box_size: int
    length_sum: int = 0
    length_sq: int = 0
    visit_sum: list[int] = field(default_factory=list)
    visit_sq: list[int] = field(default_factory=list)
    absorbed: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.visit_sum:
            self.visit_sum = [0] * self.box_size
            self.visit_sq = [0] * self.box_size
            self.absorbed = [0] * self.box_size

    def merge(self, other: "_Tally") -> None:
        self.walks += other.walks
        self.length_sum += other.length_sum
        self.length_sq += other.length_sq
        for name in ("visit_sum", "visit_sq", "absorbed"):
            mine, theirs = getattr(self, name), getattr(other, name)
            for i, v in enumerate(theirs):
                mine[i] += v


def _run_block(model: Model, seed: int, block: int, count: int, box: _Box) -> _Tally:
    thresholds, moves = _kernel(model)
    rng = np.random.Generator(np.random.Philox(key=(block << 64) | (seed & _MASK64)))
    pos = np.tile(np.array(_to_row(model, origin(model)), dtype=np.int64), (count, 1))
    alive = np.ones(count, dtype=bool)
    length = np.ones(count, dtype=np.int64)
    visits = np.zeros((count, box.size), dtype=np.int64)
    absorbed = np.zeros(box.size, dtype=np.int64)
    walk_ids = np.arange(count)

    def record_visits(ids):
        idx = box.index(pos[ids])
        hit = idx >= 0
        np.add.at(visits, (ids[hit], idx[hit]), 1)

    record_visits(walk_ids)
    steps = 0
    while alive.any():
        # every walk slot consumes a draw each step, alive or not
        u = rng.random(BLOCK)[:count]
        ids = walk_ids[alive]
        choice = np.searchsorted(thresholds, u[ids], side="right")
        dying = choice == len(moves)
        dead_ids = ids[dying]
        idx = box.index(pos[dead_ids])
        np.add.at(absorbed, idx[idx >= 0], 1)
        alive[dead_ids] = False
        movers = ids[~dying]
        if movers.size == 0:
            continue
        steps += 1
        if steps >= MAX_STEPS:
            raise SimulationError(f"walk exceeded {MAX_STEPS} steps (seed {seed}, block {block})")
        pos[movers] = _step(model, pos[movers], choice[~dying], moves)
        length[movers] += 1
        record_visits(movers)

    return _Tally(
        walks=count,
        box_size=box.size,
        length_sum=int(length.sum()),
        length_sq=int((length * length).sum()),
        visit_sum=[int(v) for v in visits.sum(axis=0)],
        visit_sq=[int(v) for v in (visits * visits).sum(axis=0)],
        absorbed=[int(v) for v in absorbed],
    )


def _run_block_args(args):
    return _run_block(*args)


def _estimate(total: int, total_sq: int, n: int) -> EstimateWithError:
    mean = total / n
    if n < 2:
        return EstimateWithError(mean, 0.0, n)
    # exact integer arithmetic for the centred sum of squares
    centred = total_sq * n - total * total
    var = centred / (n * (n - 1))
    return EstimateWithError(mean, math.sqrt(max(var, 0.0) / n), n)


@dataclass(frozen=True)
class WalkStatistics:
    """Merged Monte Carlo tallies over a box of tracked states."""

    states: tuple[LatticeState, ...]
    walks: int
    lifetime: EstimateWithError
    visits: tuple[EstimateWithError, ...]
    absorption: tuple[EstimateWithError, ...]


def run_walks(
    model: Model,
    n_walks: int,
    seed: int,
    lo: Sequence[int],
    hi: Sequence[int],
    workers: int = 1,
) -> WalkStatistics:
    """Simulate ``n_walks`` walks and tally visits and absorptions in a box.

    ``lo`` and ``hi`` bound the box in internal row coordinates (position
    then level for the two-level walk).  Lifetime counts visited states,
    including the start.
    """
    if n_walks < 1:
        raise DomainError(f"n_walks must be >= 1, got {n_walks}")
    box = _Box(tuple(int(v) for v in lo), tuple(int(v) for v in hi))
    if len(box.lo) != _width(model) or any(s < 1 for s in box.shape):
        raise DomainError(f"bad tracking box {box.lo}..{box.hi} for model {model!r}")
    jobs = [
        (model, seed, b, min(BLOCK, n_walks - b * BLOCK), box)
        for b in range(math.ceil(n_walks / BLOCK))
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(_run_block_args, jobs))
    else:
        tallies = [_run_block(*job) for job in jobs]
    total = _Tally(walks=0, box_size=box.size)
    for t in tallies:
        total.merge(t)

    n = total.walks
    visits = tuple(_estimate(s, sq, n) for s, sq in zip(total.visit_sum, total.visit_sq))
    # absorption indicators are 0/1, so their square-sum equals their sum
    absorption = tuple(_estimate(a, a, n) for a in total.absorbed)
    return WalkStatistics(
        states=tuple(_to_state(model, r) for r in box.rows()),
        walks=n,
        lifetime=_estimate(total.length_sum, total.length_sq, n),
        visits=visits,
        absorption=absorption,
    )


def _window_bounds(model: Model, radius: int) -> tuple[list[int], list[int]]:
    d = dimension(model)
    lo, hi = [-radius] * d, [radius] * d
    if isinstance(model, TwoLevelModel):
        lo, hi = lo + [0], hi + [1]
    return lo, hi


def _window_order(model: Model, states: Sequence[LatticeState]) -> list[int]:
    """Permutation putting box states in level-major lexicographic order."""
    return sorted(range(len(states)), key=lambda i: (states[i].level or 0, states[i].coords))


def window_states(model: Model, radius: int) -> list[LatticeState]:
    """States of the sup-norm ball, lexicographic, level-major for two-level."""
    if radius < 0:
        raise DomainError(f"radius must be >= 0, got {radius}")
    lo, hi = _window_bounds(model, radius)
    states = [_to_state(model, r) for r in _Box(tuple(lo), tuple(hi)).rows()]
    return [states[i] for i in _window_order(model, states)]


def mc_expected_visits(
    model: Model, target: LatticeState, n_walks: int, seed: int, workers: int = 1
) -> EstimateWithError:
    """Mean number of visits to ``target`` per walk, time 0 included."""
    row = _to_row(model, target)
    stats = run_walks(model, n_walks, seed, row, row, workers=workers)
    return stats.visits[0]


def mc_absorption_histogram(
    model: Model, n_walks: int, seed: int, window_radius: int, workers: int = 1
) -> dict[LatticeState, EstimateWithError]:
    """Absorption frequency at every state of the sup-norm window."""
    if window_radius < 0:
        raise DomainError(f"window_radius must be >= 0, got {window_radius}")
    lo, hi = _window_bounds(model, window_radius)
    stats = run_walks(model, n_walks, seed, lo, hi, workers=workers)
    order = _window_order(model, stats.states)
    return {stats.states[i]: stats.absorption[i] for i in order}


# ---------------------------------------------------------------------------
# truncated lattice


@dataclass(frozen=True)
class TruncatedSolution:
    """Dirichlet-truncated solution on the sup-norm ball of ``radius``.

    ``array`` is indexed by coordinate + radius along each axis; the
    two-level walk carries a leading level axis.
    """

    model: Model
    radius: int
    array: np.ndarray
    iterations: int
    final_residual: float
    updates: tuple[float, ...] = ()

    def __getitem__(self, state: LatticeState) -> float:
        check_state(self.model, state)
        if max(abs(c) for c in state.coords) > self.radius:
            return 0.0
        idx = tuple(c + self.radius for c in state.coords)
        if state.level is not None:
            idx = (state.level,) + idx
        return float(self.array[idx])

    def __call__(self, state: LatticeState) -> float:
        return self[state]

    @property
    def values(self) -> dict[LatticeState, float]:
        return {s: self[s] for s in window_states(self.model, self.radius)}


def _shifted(x: np.ndarray, axis: int, offset: int) -> np.ndarray:
    """``y[i] = x[i + offset]`` along ``axis`` with zero fill outside."""
    y = np.zeros_like(x)
    src = [slice(None)] * x.ndim
    dst = [slice(None)] * x.ndim
    if offset > 0:
        src[axis] = slice(offset, None)
        dst[axis] = slice(None, -offset)
    else:
        src[axis] = slice(None, offset)
        dst[axis] = slice(-offset, None)
    y[tuple(dst)] = x[tuple(src)]
    return y


def _inflow(model: Model, x: np.ndarray) -> np.ndarray:
    """Expected mass arriving at each site in one step from values ``x``."""
    if isinstance(model, Walk1DModel):
        # forward steps arrive from the left, backward from the right
        return model.alpha * (model.p * _shifted(x, 0, -1) + model.q * _shifted(x, 0, 1))
    if isinstance(model, WalkNDModel):
        total = np.zeros_like(x)
        for k in range(model.n):
            total += _shifted(x, k, -1)
            total += _shifted(x, k, 1)
        return model.alpha * total
    lateral = _shifted(x, 1, -1) + _shifted(x, 1, 1)
    return model.alpha * (lateral + x[::-1])


def _source(model: Model, radius: int) -> np.ndarray:
    shape = (2 * radius + 1,) * dimension(model)
    if isinstance(model, TwoLevelModel):
        shape = (2,) + shape
    e0 = np.zeros(shape)
    centre = (radius,) * dimension(model)
    if isinstance(model, TwoLevelModel):
        centre = (0,) + centre
    e0[centre] = 1.0
    return e0


def fixed_point_iterates(model: Model, radius: int) -> Iterator[np.ndarray]:
    """Successive Jacobi iterates X_1, X_2, ... starting from X_0 = 0."""
    if radius < 0:
        raise DomainError(f"radius must be >= 0, got {radius}")
    e0 = _source(model, radius)
    x = np.zeros_like(e0)
    while True:
        x = e0 + _inflow(model, x)
        yield x


def truncated_fixed_point(
    model: Model, radius: int, tol: float = 1e-12, max_iter: int = 100_000
) -> TruncatedSolution:
    """Solve the truncated system to within ``tol`` in sup norm.

    Stops once the update falls below ``tol * (1 - beta) / beta``, which
    bounds the distance to the exact truncated solution by ``tol``.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if radius < 0:
        raise DomainError(f"radius must be >= 0, got {radius}")
    beta = survival_factor(model)
    threshold = tol * (1.0 - beta) / beta
    prev = np.zeros_like(_source(model, radius))
    updates = []
    for it, x in enumerate(fixed_point_iterates(model, radius), start=1):
        upd = float(np.max(np.abs(x - prev)))
        updates.append(upd)
        prev = x
        if upd < threshold:
            bound = upd * beta / (1.0 - beta)
            return TruncatedSolution(model, radius, x, it, bound, tuple(updates))
        if it >= max_iter:
            raise IterationError(
                f"no convergence after {max_iter} iterations (last update {upd:.3e}, "
                f"needed < {threshold:.3e})"
            )
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class ConvergenceReport:
    radii: tuple[int, ...]
    differences: tuple[float, ...]
    ratios: tuple[float, ...]

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.differences, self.differences[1:]))

    @property
    def final(self) -> float:
        return self.differences[-1]


def uniqueness_convergence_report(
    model: Model, radii: Sequence[int], tol: float = 1e-14, max_iter: int = 100_000
) -> ConvergenceReport:
    """Sup-norm gaps between truncated solutions of consecutive radii.

    Each gap is taken over the smaller ball.  Gaps shrinking to zero show
    the truncated problems settling on one bounded solution.
    """
    radii = [int(r) for r in radii]
    if len(radii) < 2:
        raise DomainError("need at least two radii")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError(f"radii must be strictly increasing, got {radii}")
    sols = [truncated_fixed_point(model, r, tol, max_iter) for r in radii]
    diffs = []
    for small, big in zip(sols, sols[1:]):
        cut = big.radius - small.radius
        inner = [slice(None)] * big.array.ndim
        spatial = range(1, big.array.ndim) if isinstance(model, TwoLevelModel) else range(big.array.ndim)
        for ax in spatial:
            inner[ax] = slice(cut, big.array.shape[ax] - cut)
        diffs.append(float(np.max(np.abs(big.array[tuple(inner)] - small.array))))
    ratios = tuple(b / a if a > 0 else math.nan for a, b in zip(diffs, diffs[1:]))
    return ConvergenceReport(tuple(radii), tuple(diffs), ratios)
