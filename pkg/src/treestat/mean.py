"""d-means of random trees.

For the weighted symmetric-difference distance the expected distance splits
into independent per-vertex terms, so a tree minimizes it iff it keeps every
vertex present with probability above 1/2 and drops every vertex below 1/2.
Vertices at exactly 1/2 are free, which gives an interval of minimizers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ArityMismatch, EmptySample
from .metric import MetricParams, distance_matrix, g_from_marginals_all
from .sampling import MarginalProfile
from .tree_core import Tree, TreeSample, Vertex, enumerate_indicators, enumerate_trees, layout

__all__ = ["MeanInterval", "empirical_mean", "mean_from_marginals", "brute_force_mean"]

TIE_TOL = 1e-12


@dataclass(frozen=True)
class MeanInterval:
    """All trees ``t`` with ``lower <= t <= upper`` are d-means."""

    lower: Tree
    upper: Tree

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("lower mean tree must be contained in the upper one")

    @property
    def is_unique(self) -> bool:
        return self.lower == self.upper

    def __contains__(self, t: Tree) -> bool:
        return self.lower <= t <= self.upper

    def members(self) -> list[Tree]:
        """Every tree in the interval (exponential in the number of free vertices)."""
        free = sorted(self.upper.vertices - self.lower.vertices)
        out = []
        for mask in itertools.product((False, True), repeat=len(free)):
            chosen = self.lower.vertices | {v for v, keep in zip(free, mask) if keep}
            if all(len(v) == 1 or Vertex(v[:-1]) in chosen for v in chosen):
                out.append(Tree(self.lower.m, frozenset(chosen)))
        return sorted(out, key=Tree.sort_key)


def _interval(m: int, K: int, above: np.ndarray, at_least: np.ndarray) -> MeanInterval:
    lay = layout(m, K)
    lower = Tree(m, frozenset(lay.vertices[i] for i in np.flatnonzero(above)))
    upper = Tree(m, frozenset(lay.vertices[i] for i in np.flatnonzero(at_least)))
    return MeanInterval(lower, upper)


def _check_params(m: int, K: int, params: MetricParams | None) -> None:
    if params is None:
        return
    if params.m != m:
        raise ArityMismatch(f"arity {m} != metric arity {params.m}")
    if params.depth_cap != K:
        raise ValueError(f"depth {K} != metric depth cap {params.depth_cap}")


def empirical_mean(sample: TreeSample, params: MetricParams | None = None) -> MeanInterval:
    """Majority-rule mean; the result does not depend on the weights in ``params``."""
    if sample.n == 0:
        raise EmptySample("empirical mean of an empty sample")
    _check_params(sample.m, sample.depth_cap, params)
    twice = 2 * sample.counts()
    return _interval(sample.m, sample.depth_cap, twice > sample.n, twice >= sample.n)


def mean_from_marginals(profile: MarginalProfile, params: MetricParams | None = None) -> MeanInterval:
    _check_params(profile.m, profile.depth, params)
    p = profile.probs
    return _interval(profile.m, profile.depth, p > 0.5, p >= 0.5)


Source = Union[MarginalProfile, TreeSample]


def _objective(source: Source, params: MetricParams, exponent: float) -> np.ndarray:
    m, K = params.m, params.depth_cap
    trees = enumerate_indicators(m, K)
    if isinstance(source, TreeSample):
        if source.n == 0:
            raise EmptySample("brute-force mean of an empty sample")
        _check_params(source.m, source.depth_cap, params)
        d = distance_matrix(trees, source.indicators(), params)
        return (d**exponent).mean(axis=1)
    _check_params(source.m, source.depth, params)
    if exponent == 1:
        return g_from_marginals_all(trees, source, params)
    p = source.probs
    if not np.all((p == 0) | (p == 1)):
        raise ValueError("exponent > 1 needs the full law; marginals only determine it for point masses")
    d = distance_matrix(trees, (p == 1)[None, :], params)[:, 0]
    return d**exponent


def brute_force_mean(source: Source, params: MetricParams, exponent: float = 1) -> list[Tree]:
    """All minimizers of the expected distance, found by exhaustive search.

    Values within ``1e-12`` of the minimum count as ties.
    """
    if exponent < 1:
        raise ValueError(f"exponent must be >= 1, got {exponent}")
    values = _objective(source, params, exponent)
    best = values.min()
    all_trees = enumerate_trees(params.m, params.depth_cap)
    return [all_trees[i] for i in np.flatnonzero(values <= best + TIE_TOL)]
