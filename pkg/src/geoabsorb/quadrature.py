"""Expected visits of the symmetric n-dimensional walk by numerical quadrature.

Integrating the lattice Green's function over its last frequency in closed
form leaves an (n-1)-fold integral over the cube [0, pi]^(n-1):

    X_u = 1 / (2 alpha pi^(n-1)) * int prod_i cos(u_i w_i) * exp(-|u_n| w_n) / sinh(w_n)

where the last frequency ``w_n > 0`` is tied to the others by

    sum_i cos(w_i) + cosh(w_n) = 1 / (2 alpha).

The remaining integral is smooth and periodic-like on the cube, so a
tensor-product Gauss-Legendre rule converges spectrally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import AccuracyError, CapabilityError, DomainError
from .models import MAX_DIMENSION, LatticeState, WalkNDModel

__all__ = [
    "QuadratureConfig",
    "FrequencyPoint",
    "default_config",
    "gauss_legendre_rule",
    "omega_last",
    "frequency_point",
    "integrand",
    "expected_visits_nd",
    "expected_visits_nd_many",
    "absorption_prob_nd",
    "summed_visits_nd",
    "min_nodes",
]


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_per_axis: int = 64

    def __post_init__(self):
        if int(self.nodes_per_axis) != self.nodes_per_axis or self.nodes_per_axis < 1:
            raise DomainError(f"nodes_per_axis must be a positive integer, got {self.nodes_per_axis!r}")


@dataclass(frozen=True)
class FrequencyPoint:
    omegas: tuple[float, ...]
    omega_last: float


def default_config(n: int) -> QuadratureConfig:
    """64 nodes per axis in two dimensions, 48 above."""
    return QuadratureConfig(64 if n == 2 else 48)


@lru_cache(maxsize=64)
def _rule(k: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(k)
    nodes = 0.5 * math.pi * (x + 1.0)
    weights = 0.5 * math.pi * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_rule(k: int) -> tuple[np.ndarray, np.ndarray]:
    """k-point Gauss-Legendre nodes and weights on [0, pi]."""
    if int(k) != k or k < 1:
        raise DomainError(f"rule order must be a positive integer, got {k!r}")
    nodes, weights = _rule(int(k))
    return nodes.copy(), weights.copy()


def _check_model_coords(model: WalkNDModel, count: int) -> None:
    if model.n > MAX_DIMENSION:
        raise CapabilityError(
            f"dimension {model.n} exceeds the supported ceiling of {MAX_DIMENSION}"
        )
    if count != model.n:
        raise DomainError(f"state has {count} coordinates, model has dimension {model.n}")


def _omega_last(alpha: float, cos_sum):
    return np.arccosh(1.0 / (2.0 * alpha) - cos_sum)


def omega_last(model: WalkNDModel, omegas: Sequence[float]) -> float:
    """Last frequency fixed by the cosh constraint; always strictly positive."""
    omegas = np.asarray(omegas, dtype=float)
    if omegas.shape != (model.n - 1,):
        raise DomainError(f"expected {model.n - 1} frequencies, got shape {omegas.shape}")
    if np.any(omegas < 0.0) or np.any(omegas > math.pi) or not np.all(np.isfinite(omegas)):
        raise DomainError(f"frequencies must lie in [0, pi], got {omegas.tolist()}")
    return float(_omega_last(model.alpha, float(np.sum(np.cos(omegas)))))


def frequency_point(model: WalkNDModel, omegas: Sequence[float]) -> FrequencyPoint:
    return FrequencyPoint(tuple(float(w) for w in omegas), omega_last(model, omegas))


def _coords(u) -> tuple[int, ...]:
    return u.coords if isinstance(u, LatticeState) else tuple(int(c) for c in u)


def integrand(model: WalkNDModel, u: LatticeState, omegas: Sequence[float]) -> float:
    coords = _coords(u)
    _check_model_coords(model, len(coords))
    wn = omega_last(model, omegas)
    trig = math.prod(math.cos(ui * wi) for ui, wi in zip(coords[:-1], omegas))
    return trig * math.exp(-abs(coords[-1]) * wn) / math.sinh(wn)


def min_nodes(coords: Sequence[int]) -> int:
    """Smallest node count that resolves ``cos(u_i w_i)`` for the trigonometric coordinates."""
    trig = [abs(c) for c in coords[:-1]]
    return 8 * max(trig, default=0) + 16


@lru_cache(maxsize=16)
def _grid(n: int, alpha: float, k: int):
    """Tensor grid of nodes, product weights, last frequency and 1/sinh on it."""
    nodes, weights = _rule(k)
    axes = np.meshgrid(*([nodes] * (n - 1)), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], axis=0)  # (n-1, k^(n-1))
    wgrid = np.ones(pts.shape[1])
    for wa in np.meshgrid(*([weights] * (n - 1)), indexing="ij"):
        wgrid = wgrid * wa.ravel()
    wn = _omega_last(alpha, np.cos(pts).sum(axis=0))
    base = wgrid / np.sinh(wn)
    for arr in (pts, wn, base):
        arr.setflags(write=False)
    return pts, wn, base


def expected_visits_nd_many(
    model: WalkNDModel,
    states: Iterable[LatticeState | Sequence[int]],
    config: QuadratureConfig | None = None,
) -> np.ndarray:
    """Quadrature values of X_u for many states, sharing one tensor grid.

    The last coordinate of each state plays the hyperbolic role.  Summation
    runs over the flattened grid in a fixed order, so results are
    reproducible run to run.
    """
    if config is None:
        config = default_config(model.n)
    k = int(config.nodes_per_axis)
    coords = np.array([_coords(s) for s in states], dtype=np.int64)
    if coords.size == 0:
        return np.zeros(0)
    if coords.ndim != 2:
        raise DomainError("states must all have the same number of coordinates")
    _check_model_coords(model, coords.shape[1])
    need = min_nodes(np.abs(coords).max(axis=0).tolist())
    if k < need:
        raise AccuracyError(
            f"{k} nodes per axis cannot resolve |u_i| up to {np.abs(coords[:, :-1]).max()}; "
            f"use at least {need}"
        )
    pts, wn, base = _grid(model.n, float(model.alpha), k)
    out = np.empty(len(coords))
    # chunk states to bound memory of the (states x grid) product
    chunk = max(1, 2_000_000 // pts.shape[1])
    scale = 1.0 / (2.0 * model.alpha * math.pi ** (model.n - 1))
    for start in range(0, len(coords), chunk):
        c = coords[start : start + chunk]
        vals = np.exp(-np.abs(c[:, -1:]).astype(float) * wn[None, :]) * base[None, :]
        for i in range(model.n - 1):
            vals *= np.cos(c[:, i : i + 1].astype(float) * pts[i][None, :])
        out[start : start + chunk] = vals.sum(axis=1) * scale
    return out


def expected_visits_nd(
    model: WalkNDModel, u: LatticeState | Sequence[int], config: QuadratureConfig | None = None
) -> float:
    return float(expected_visits_nd_many(model, [u], config)[0])


def absorption_prob_nd(
    model: WalkNDModel, u: LatticeState | Sequence[int], config: QuadratureConfig | None = None
) -> float:
    return (1.0 - 2 * model.n * model.alpha) * expected_visits_nd(model, u, config)


def summed_visits_nd(model: WalkNDModel) -> float:
    """Sum of X_u over the whole lattice from the integral representation.

    Summing over the hyperbolic coordinate gives coth(w_n / 2); summing
    over the others collapses the integral onto w = 0, where w_n takes its
    minimum arccosh(1/(2 alpha) - (n - 1)).
    """
    w = omega_last(model, [0.0] * (model.n - 1))
    return 1.0 / (2.0 * model.alpha * math.tanh(0.5 * w) * math.sinh(w))
