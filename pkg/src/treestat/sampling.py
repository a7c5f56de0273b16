"""Galton-Watson type tree laws with exact vertex marginals and covariances.

Two offspring rules are supported:

* ``PerSlot(rho_1..rho_m)``: every child slot ``a`` of a present vertex is
  occupied independently with probability ``rho_a``.  With all ``rho_a = rho``
  and ``root_prob = rho`` this is the maximal root cluster of Bernoulli(rho)
  site percolation on the full tree.
* ``CountLeftFill(q_0..q_m)``: a present vertex has ``N ~ q`` children which
  occupy the leftmost ``N`` slots.

:class:`PointMass` is a degenerate law concentrated on one tree; it is handy
as a null model for arbitrary fixed trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ArityMismatch, DepthExceeded, UnsupportedModel
from .tree_core import Tree, TreeSample, Vertex, layout

__all__ = [
    "PerSlot",
    "CountLeftFill",
    "GWModel",
    "PointMass",
    "MarginalProfile",
    "RngSpec",
    "sample_tree",
    "sample_indicators",
    "sample_trees",
    "marginal_profile",
    "joint_presence",
    "joint_presence_matrix",
    "exact_cov",
]


@dataclass(frozen=True)
class PerSlot:
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not all(0.0 <= p <= 1.0 for p in probs):
            raise ValueError(f"slot probabilities must lie in [0, 1]: {probs}")
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class CountLeftFill:
    masses: tuple

    def __post_init__(self):
        masses = tuple(float(q) for q in self.masses)
        if any(q < 0 for q in masses):
            raise ValueError(f"offspring masses must be non-negative: {masses}")
        if abs(math.fsum(masses) - 1.0) > 1e-12:
            raise ValueError(f"offspring masses must sum to 1, got {math.fsum(masses)!r}")
        object.__setattr__(self, "masses", masses)

    def tail(self, a: int) -> float:
        """``P(N >= a)``."""
        return min(1.0, math.fsum(self.masses[a:]))


@dataclass(frozen=True)
class GWModel:
    m: int
    root_prob: float
    offspring: Union[PerSlot, CountLeftFill]

    def __post_init__(self):
        if not 0.0 <= self.root_prob <= 1.0:
            raise ValueError(f"root_prob must lie in [0, 1], got {self.root_prob}")
        if isinstance(self.offspring, PerSlot):
            expected = self.m
        elif isinstance(self.offspring, CountLeftFill):
            expected = self.m + 1
        else:
            raise TypeError(f"unknown offspring rule {self.offspring!r}")
        got = len(self.offspring.probs if isinstance(self.offspring, PerSlot) else self.offspring.masses)
        if got != expected:
            raise ValueError(f"offspring rule needs {expected} numbers for m={self.m}, got {got}")

    @classmethod
    def perslot(cls, probs: Sequence[float], root_prob: float = 1.0) -> "GWModel":
        return cls(len(probs), float(root_prob), PerSlot(tuple(probs)))

    @classmethod
    def countfill(cls, masses: Sequence[float], root_prob: float = 1.0) -> "GWModel":
        return cls(len(masses) - 1, float(root_prob), CountLeftFill(tuple(masses)))

    @classmethod
    def binomial(cls, p: float, root_prob: float = 1.0) -> "GWModel":
        """Binomial(2, p) offspring counts, realized as two independent slots."""
        return cls.perslot((p, p), root_prob)

    @classmethod
    def percolation(cls, rho: float, m: int) -> "GWModel":
        """Maximal root cluster of Bernoulli(rho) site percolation."""
        return cls.perslot((rho,) * m, root_prob=rho)

    @property
    def is_deterministic(self) -> bool:
        nums = self.offspring.probs if isinstance(self.offspring, PerSlot) else self.offspring.masses
        return all(x in (0.0, 1.0) for x in (self.root_prob, *nums))

    def describe(self) -> str:
        if isinstance(self.offspring, PerSlot):
            body = "perslot:" + ",".join(repr(p) for p in self.offspring.probs)
        else:
            body = "countfill:" + ",".join(repr(q) for q in self.offspring.masses)
        return f"{body};root_prob={self.root_prob!r}"


@dataclass(frozen=True)
class PointMass:
    """Law concentrated on a single tree."""

    tree: Tree

    @property
    def m(self) -> int:
        return self.tree.m

    @property
    def is_deterministic(self) -> bool:
        return True

    def describe(self) -> str:
        return f"pointmass:{self.tree}"


TreeLaw = Union[GWModel, PointMass]


@dataclass(frozen=True)
class MarginalProfile:
    """Presence probability of every vertex up to generation ``depth``, heap order."""

    m: int
    depth: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        lay = layout(self.m, self.depth)
        probs = np.array(self.probs, dtype=float)
        if probs.shape != (lay.size,):
            raise ValueError(f"expected {lay.size} probabilities for m={self.m}, K={self.depth}")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("marginals must lie in [0, 1]")
        if lay.size > 1 and np.any(probs[1:] > probs[lay.parent[1:]] + 1e-12):
            raise ValueError("marginals must not increase from mother to child")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, m: int, depth: int, mapping: dict) -> "MarginalProfile":
        """Vertices missing from ``mapping`` get probability 0."""
        lay = layout(m, depth)
        probs = np.zeros(lay.size)
        for v, p in mapping.items():
            v = v if isinstance(v, Vertex) else Vertex(v)
            if v not in lay.index:
                raise DepthExceeded(f"vertex {v} outside m={m}, K={depth}")
            probs[lay.index[v]] = p
        return cls(m, depth, probs)

    @classmethod
    def indicator(cls, t: Tree, depth: int) -> "MarginalProfile":
        return cls(t.m, depth, t.indicator(depth).astype(float))

    def __getitem__(self, v) -> float:
        v = v if isinstance(v, Vertex) else Vertex(v)
        return float(self.probs[layout(self.m, self.depth).index[v]])

    def items(self):
        lay = layout(self.m, self.depth)
        return zip(lay.vertices, self.probs.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MarginalProfile):
            return NotImplemented
        return (self.m, self.depth) == (other.m, other.depth) and np.array_equal(self.probs, other.probs)

    __hash__ = None


@dataclass(frozen=True)
class RngSpec:
    """Master seed plus a spawn path; ``stream(i)`` is a reproducible generator.

    Streams are derived with :class:`numpy.random.SeedSequence` so the value of
    replicate ``i`` depends only on ``(seed, path, i)``, never on the order in
    which replicates are run.
    """

    seed: int
    path: tuple = ()

    def stream(self, i: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path + (i,))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, j: int) -> "RngSpec":
        return RngSpec(self.seed, self.path + (j, 0))


def _slot_probs(model: GWModel) -> np.ndarray:
    """Per-slot occupancy probabilities ``P(slot a occupied | mother present)``."""
    off = model.offspring
    if isinstance(off, PerSlot):
        return np.array(off.probs)
    return np.array([off.tail(a) for a in range(1, model.m + 1)])


def sample_indicators(model: TreeLaw, K: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` independent trees of depth <= K as an ``(n, layout.size)`` boolean matrix."""
    lay = layout(model.m, K)
    if isinstance(model, PointMass):
        row = model.tree.indicator(K)
        return np.broadcast_to(row, (n, lay.size)).copy()
    out = np.zeros((n, lay.size), dtype=bool)
    if K == 0 or n == 0:
        return out
    off = model.offspring
    m = model.m
    out[:, 0] = rng.random(n) < model.root_prob
    if isinstance(off, PerSlot):
        rho = np.array(off.probs)
        for k in range(1, K):
            parents = lay.gen_slices[k - 1]
            children = lay.gen_slices[k]
            width = children.stop - children.start
            occupied = rng.random((n, width)) < np.tile(rho, width // m)
            out[:, children] = occupied & np.repeat(out[:, parents], m, axis=1)
    else:
        cdf = np.cumsum(off.masses)
        cdf[-1] = 1.0
        slots = np.arange(1, m + 1)
        for k in range(1, K):
            parents = lay.gen_slices[k - 1]
            children = lay.gen_slices[k]
            n_par = parents.stop - parents.start
            counts = np.searchsorted(cdf, rng.random((n, n_par)), side="right")
            occupied = (counts[:, :, None] >= slots).reshape(n, n_par * m)
            out[:, children] = occupied & np.repeat(out[:, parents], m, axis=1)
    return out


def sample_tree(model: TreeLaw, K: int, rng: np.random.Generator) -> Tree:
    return Tree.from_indicator(model.m, sample_indicators(model, K, 1, rng)[0])


def sample_trees(model: TreeLaw, K: int, n: int, rng: np.random.Generator) -> TreeSample:
    return TreeSample.from_indicators(model.m, K, sample_indicators(model, K, n, rng))


def marginal_profile(model: TreeLaw, K: int) -> MarginalProfile:
    """Exact presence probability of every vertex up to generation ``K``."""
    if isinstance(model, PointMass):
        return MarginalProfile.indicator(model.tree, K)
    lay = layout(model.m, K)
    slot = _slot_probs(model)
    probs = np.empty(lay.size)
    if lay.size:
        probs[0] = model.root_prob
        for i in range(1, lay.size):
            probs[i] = probs[lay.parent[i]] * slot[lay.slot[i] - 1]
    return MarginalProfile(model.m, K, probs)


def joint_presence(model: TreeLaw, u, v) -> float:
    """``P(u and v both present)``; exact for slot-independent laws only."""
    u = u if isinstance(u, Vertex) else Vertex(u)
    v = v if isinstance(v, Vertex) else Vertex(v)
    for w in (u, v):
        w.check_arity(model.m)
    if isinstance(model, PointMass):
        return float(u in model.tree and v in model.tree)
    if not isinstance(model.offspring, PerSlot):
        raise UnsupportedModel("joint presence needs independent slots (PerSlot)")
    rho = model.offspring.probs
    common = 0
    while common < min(len(u), len(v)) and u[common] == v[common]:
        common += 1
    # the union of the two root paths: shared prefix plus the two branches
    p = model.root_prob
    for a in u[1:]:
        p *= rho[a - 1]
    for a in v[common:]:
        p *= rho[a - 1]
    return p


def joint_presence_matrix(model: TreeLaw, K: int) -> np.ndarray:
    lay = layout(model.m, K)
    out = np.empty((lay.size, lay.size))
    for i, u in enumerate(lay.vertices):
        for j in range(i, lay.size):
            out[i, j] = out[j, i] = joint_presence(model, u, lay.vertices[j])
    return out


def exact_cov(model: TreeLaw, s: Tree, t: Tree, params) -> float:
    """``Cov(d(T, s), d(T, t))`` for ``T`` drawn from ``model``, generations <= K."""
    if model.m != params.m or s.m != params.m or t.m != params.m:
        raise ArityMismatch("model, probes and metric must share arity")
    K = params.depth_cap
    if isinstance(model, GWModel) and not isinstance(model.offspring, PerSlot):
        raise UnsupportedModel("exact covariance needs independent slots (PerSlot)")
    p = marginal_profile(model, K).probs
    joint = joint_presence_matrix(model, K)
    phi_v = params.vertex_weights
    a = phi_v * (1.0 - 2.0 * s.indicator(K))
    b = phi_v * (1.0 - 2.0 * t.indicator(K))
    return float(a @ (joint - np.outer(p, p)) @ b)
