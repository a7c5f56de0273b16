"""Supremum-deviation statistics over tree space.

With marginal differences ``delta_v`` the deviation of expected distances is

    D(y) = sum_v phi(v) * delta_v * (1 - 2 y(v)) = C + 2 * sum_{v in y} w_v,

where ``C = sum_v phi(v) delta_v`` and ``w_v = -phi(v) delta_v``.  Maximizing
``D`` over trees is a maximum-weight rooted subtree problem, solved bottom-up
by ``f(v) = w_v + sum_a max(0, f(va))``.  The supremum of ``|D|`` is the larger
of the two signed problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, EmptySample
from .metric import MetricParams
from .sampling import MarginalProfile
from .tree_core import Tree, TreeSample, enumerate_indicators, layout

__all__ = [
    "DeltaProfile",
    "SupResult",
    "empirical_marginals",
    "sup_deviation",
    "sup_deviation_batch",
    "brute_force_sup",
    "deviation",
    "one_sample_statistic",
    "two_sample_statistic",
    "two_sample_factor",
    "truncation_bound",
]

# relative slack under which the positive signed problem wins a tie
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class DeltaProfile:
    m: int
    depth: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        size = layout(self.m, self.depth).size
        if values.shape != (size,):
            raise ValueError(f"expected {size} deltas for m={self.m}, K={self.depth}")
        if np.any(np.abs(values) > 1):
            raise ValueError("deltas must lie in [-1, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def between(cls, p: MarginalProfile, q: MarginalProfile) -> "DeltaProfile":
        if (p.m, p.depth) != (q.m, q.depth):
            raise ArityMismatch(f"profiles of shape (m={p.m}, K={p.depth}) and (m={q.m}, K={q.depth})")
        return cls(p.m, p.depth, p.probs - q.probs)


@dataclass(frozen=True)
class SupResult:
    value: float
    witness: Tree
    sign: int  # +1: sup of D, -1: sup of -D


def empirical_marginals(sample: TreeSample, K: int | None = None) -> MarginalProfile:
    """Fraction of sample trees containing each vertex."""
    if sample.n == 0:
        raise EmptySample("empirical marginals of an empty sample")
    if K is not None and K != sample.depth_cap:
        sample = TreeSample(sample.m, K, sample.trees)
    return MarginalProfile(sample.m, sample.depth_cap, sample.counts() / sample.n)


def _check(delta: DeltaProfile, params: MetricParams) -> None:
    if delta.m != params.m or delta.depth != params.depth_cap:
        raise ArityMismatch(
            f"delta is (m={delta.m}, K={delta.depth}), metric is (m={params.m}, K={params.depth_cap})"
        )


def _subtree_gains(w: np.ndarray, m: int, K: int) -> np.ndarray:
    """Bottom-up ``f`` values; ``w`` may carry leading batch axes."""
    lay = layout(m, K)
    f = np.array(w, dtype=float, copy=True)
    for k in range(K - 1, 0, -1):
        parents = lay.gen_slices[k - 1]
        children = lay.gen_slices[k]
        kids = f[..., children].reshape(*f.shape[:-1], parents.stop - parents.start, m)
        f[..., parents] += np.maximum(kids, 0.0).sum(axis=-1)
    return f


def _best_subtree(w: np.ndarray, m: int, K: int) -> np.ndarray:
    """Canonical maximizer: a vertex is kept iff its mother is and ``f > 0``."""
    lay = layout(m, K)
    f = _subtree_gains(w, m, K)
    keep = np.zeros(lay.size, dtype=bool)
    if lay.size:
        keep[0] = f[0] > 0
        for i in range(1, lay.size):
            keep[i] = keep[lay.parent[i]] and f[i] > 0
    return keep


def deviation(y: np.ndarray, delta: np.ndarray, phi_v: np.ndarray) -> float:
    """``D(y)`` for an indicator vector ``y``."""
    return math.fsum(phi_v * delta * (1.0 - 2.0 * np.asarray(y, dtype=float)))


def sup_deviation(delta: DeltaProfile, params: MetricParams) -> SupResult:
    """Exact ``sup_y |D(y)|`` over trees of depth <= K, with a witness tree."""
    _check(delta, params)
    m, K = params.m, params.depth_cap
    phi_v = params.vertex_weights
    wd = phi_v * delta.values
    y_pos = _best_subtree(-wd, m, K)
    y_neg = _best_subtree(wd, m, K)
    d_pos = deviation(y_pos, delta.values, phi_v)
    d_neg = -deviation(y_neg, delta.values, phi_v)
    # both optima are >= 0 mathematically; clamp rounding noise
    d_pos, d_neg = max(d_pos, 0.0), max(d_neg, 0.0)
    if d_pos >= d_neg - _TIE_RTOL * max(d_pos, d_neg, 1e-300):
        return SupResult(d_pos, Tree.from_indicator(m, y_pos), +1)
    return SupResult(d_neg, Tree.from_indicator(m, y_neg), -1)


def sup_deviation_batch(deltas: np.ndarray, params: MetricParams) -> np.ndarray:
    """Values of :func:`sup_deviation` for a ``(B, size)`` array of deltas."""
    m, K = params.m, params.depth_cap
    phi_v = params.vertex_weights
    wd = np.atleast_2d(deltas) * phi_v
    c = wd.sum(axis=-1)
    mws_pos = np.maximum(_subtree_gains(-wd, m, K)[..., 0], 0.0)
    mws_neg = np.maximum(_subtree_gains(wd, m, K)[..., 0], 0.0)
    return np.maximum(np.maximum(c + 2 * mws_pos, -c + 2 * mws_neg), 0.0)


def brute_force_sup(delta: DeltaProfile, params: MetricParams) -> SupResult:
    """Exhaustive search over every tree of depth <= K."""
    _check(delta, params)
    phi_v = params.vertex_weights
    trees = enumerate_indicators(params.m, params.depth_cap)
    wd = phi_v * delta.values
    d = wd.sum() - 2.0 * (trees @ wd)
    i_pos, i_neg = int(np.argmax(d)), int(np.argmin(d))
    d_pos = deviation(trees[i_pos], delta.values, phi_v)
    d_neg = -deviation(trees[i_neg], delta.values, phi_v)
    if d_pos >= d_neg - _TIE_RTOL * max(abs(d_pos), abs(d_neg), 1e-300):
        return SupResult(max(d_pos, 0.0), Tree.from_indicator(params.m, trees[i_pos]), +1)
    return SupResult(max(d_neg, 0.0), Tree.from_indicator(params.m, trees[i_neg]), -1)


def one_sample_sup(sample: TreeSample, null_profile: MarginalProfile, params: MetricParams) -> SupResult:
    """Unscaled supremum with witness; multiply by ``sqrt(n)`` for the statistic."""
    p_hat = empirical_marginals(sample)
    return sup_deviation(DeltaProfile.between(p_hat, null_profile), params)


def one_sample_statistic(sample: TreeSample, null_profile: MarginalProfile, params: MetricParams) -> float:
    """``sqrt(n) * sup_y |g_n(y) - g_0(y)|``."""
    return math.sqrt(sample.n) * one_sample_sup(sample, null_profile, params).value


def two_sample_factor(n1: int, n2: int) -> float:
    """``sqrt(n n' / (n + n'))``; for equal sizes the caller's convention is ``sqrt(n)``."""
    if n1 == n2:
        return math.sqrt(n1)
    return math.sqrt(n1 * n2 / (n1 + n2))


def two_sample_sup(sample1: TreeSample, sample2: TreeSample, params: MetricParams) -> SupResult:
    if sample1.n == 0 or sample2.n == 0:
        raise EmptySample("two-sample statistic needs two nonempty samples")
    if sample1.m != sample2.m:
        raise ArityMismatch(f"sample arities {sample1.m} and {sample2.m}")
    if sample1.depth_cap != sample2.depth_cap:
        raise ValueError(f"sample depth caps {sample1.depth_cap} and {sample2.depth_cap}")
    delta = DeltaProfile.between(empirical_marginals(sample1), empirical_marginals(sample2))
    return sup_deviation(delta, params)


def two_sample_statistic(sample1: TreeSample, sample2: TreeSample, params: MetricParams) -> float:
    """Scaled two-sample statistic; ``sqrt(n)`` scaling when ``n == n'``."""
    factor = two_sample_factor(sample1.n, sample2.n)
    return factor * two_sample_sup(sample1, sample2, params).value


def truncation_bound(params: MetricParams, K: int | None = None) -> float:
    """Total weight of all vertices below generation ``K``: ``z (mz)^K / (1 - mz)``."""
    if not params.is_geometric:
        raise ValueError("truncation bound needs a geometric weight rule")
    K = params.depth_cap if K is None else K
    m, z = params.m, params.z
    if m * z >= 1:
        raise ValueError(f"m*z = {m * z} >= 1: the weights are not summable")
    return z * (m * z) ** K / (1 - m * z)

