"""Weighted symmetric-difference distances on tree space and expected distances.

``distance(x, y) = sum of phi(gen(v)) over v in x ^ y``.  The weight rule is
either geometric, ``phi(k) = z**k``, or an explicit per-generation table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ArityMismatch, CLTUnsafe, DepthExceeded, EmptySample
from .tree_core import Tree, TreeSample, check_same_arity, layout

__all__ = [
    "MetricParams",
    "phi",
    "distance",
    "distance_otter_neveu",
    "g_from_marginals",
    "g_empirical",
    "generation_mass",
]


@dataclass(frozen=True)
class MetricParams:
    """Arity, weight rule and depth cap.

    Use :meth:`geometric` (enforces ``0 < z < m**-1.5``), :meth:`geometric_relaxed`
    (``0 < z < 1``, flagged as unsafe for inference) or :meth:`per_generation`.
    """

    m: int
    depth_cap: int
    z: float | None = None
    weights: tuple | None = None
    clt_safe: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"arity must be >= 1, got {self.m}")
        if self.depth_cap < 1:
            raise ValueError(f"depth cap must be >= 1, got {self.depth_cap}")
        if (self.z is None) == (self.weights is None):
            raise ValueError("give exactly one of z or weights")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) < self.depth_cap:
                raise ValueError(f"need weights for generations 1..{self.depth_cap}, got {len(w)}")
            if not all(x > 0 and math.isfinite(x) for x in w):
                raise ValueError("per-generation weights must be strictly positive")
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "clt_safe", False)

    @classmethod
    def geometric(cls, m: int, z: float, depth_cap: int) -> "MetricParams":
        bound = m**-1.5
        if not 0 < z < bound:
            raise CLTUnsafe(f"z={z} outside (0, m^-3/2) = (0, {bound:.6g}); use geometric_relaxed")
        return cls(m=m, depth_cap=depth_cap, z=float(z), clt_safe=True)

    @classmethod
    def geometric_relaxed(cls, m: int, z: float, depth_cap: int) -> "MetricParams":
        if not 0 < z < 1:
            raise ValueError(f"z must lie in (0, 1), got {z}")
        return cls(m=m, depth_cap=depth_cap, z=float(z), clt_safe=0 < z < m**-1.5)

    @classmethod
    def per_generation(cls, m: int, weights: Sequence[float], depth_cap: int | None = None) -> "MetricParams":
        return cls(m=m, depth_cap=len(weights) if depth_cap is None else depth_cap, weights=tuple(weights))

    @property
    def is_geometric(self) -> bool:
        return self.z is not None

    def with_depth(self, depth_cap: int) -> "MetricParams":
        return MetricParams(self.m, depth_cap, self.z, self.weights, self.clt_safe)

    def phi(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"generations start at 1, got {k}")
        if self.z is not None:
            return self.z**k
        if k > len(self.weights):
            raise ValueError(f"no weight for generation {k}; table covers 1..{len(self.weights)}")
        return self.weights[k - 1]

    @cached_property
    def vertex_weights(self) -> np.ndarray:
        """``phi`` of every vertex of the truncated full tree, heap order."""
        lay = layout(self.m, self.depth_cap)
        per_gen = np.array([self.phi(k) for k in range(1, self.depth_cap + 1)])
        out = per_gen[lay.gen - 1]
        out.setflags(write=False)
        return out


def phi(params: MetricParams, k: int) -> float:
    return params.phi(k)


def generation_mass(params: MetricParams, k: int) -> float:
    """Total weight of generation ``k``: ``m**(k-1) * phi(k)``."""
    return params.m ** (k - 1) * params.phi(k)


def _check_tree(t: Tree, params: MetricParams) -> None:
    if t.m != params.m:
        raise ArityMismatch(f"tree arity {t.m} != metric arity {params.m}")
    if t.depth > params.depth_cap:
        raise DepthExceeded(f"tree depth {t.depth} exceeds cap {params.depth_cap}")


def distance(x: Tree, y: Tree, params: MetricParams) -> float:
    check_same_arity(x, y)
    _check_tree(x, params)
    _check_tree(y, params)
    return math.fsum(params.phi(v.gen) for v in x.vertices ^ y.vertices)


def distance_otter_neveu(x: Tree, y: Tree) -> float:
    """``exp(-k)`` with ``k`` the last generation through which ``x`` and ``y`` agree."""
    check_same_arity(x, y)
    diff = x.vertices ^ y.vertices
    if not diff:
        return 0.0
    first_disagreement = min(v.gen for v in diff)
    return math.exp(-(first_disagreement - 1))


def _profile_probs(profile, params: MetricParams) -> np.ndarray:
    if profile.m != params.m:
        raise ArityMismatch(f"profile arity {profile.m} != metric arity {params.m}")
    if profile.depth != params.depth_cap:
        raise ValueError(f"profile depth {profile.depth} != depth cap {params.depth_cap}")
    return profile.probs


def g_from_marginals(y: Tree, profile, params: MetricParams) -> float:
    """Expected distance from ``y`` to a random tree with the given vertex marginals."""
    p = _profile_probs(profile, params)
    _check_tree(y, params)
    yv = y.indicator(params.depth_cap)
    terms = params.vertex_weights * np.where(yv, 1.0 - p, p)
    return math.fsum(terms)


def g_from_marginals_all(indicators: np.ndarray, profile, params: MetricParams) -> np.ndarray:
    """:func:`g_from_marginals` for every row of an indicator matrix."""
    p = _profile_probs(profile, params)
    phi_v = params.vertex_weights
    return (phi_v * p).sum() + (np.asarray(indicators, dtype=float) @ (phi_v * (1.0 - 2.0 * p)))


def g_empirical(y: Tree, sample: TreeSample, params: MetricParams, exponent: float = 1) -> float:
    """Mean of ``distance(T_i, y) ** exponent`` over the sample."""
    if exponent < 1:
        raise ValueError(f"exponent must be >= 1, got {exponent}")
    if sample.n == 0:
        raise EmptySample("g_empirical needs at least one tree")
    if sample.m != params.m:
        raise ArityMismatch(f"sample arity {sample.m} != metric arity {params.m}")
    return math.fsum(distance(t, y, params) ** exponent for t in sample) / sample.n


def distance_matrix(a: np.ndarray, b: np.ndarray, params: MetricParams) -> np.ndarray:
    """Pairwise distances between rows of two indicator matrices."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    phi_v = params.vertex_weights
    return (a[:, None, :] ^ b[None, :, :]) @ phi_v
