"""Rooted trees as prefix-closed vertex sets of the full m-ary tree.

A vertex is a label sequence ``(1, a_2, ..., a_k)`` with every ``a_i`` in
``1..m``; its generation is the sequence length.  A tree is a finite set of
vertices that contains the mother of each of its members.

For numerical work every tree of depth at most ``K`` is also viewed as a
boolean vector indexed by the vertices of the full tree up to generation
``K`` in heap order (see :class:`Layout`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    ArityViolation,
    DepthExceeded,
    EnumerationTooLarge,
    InvalidVertex,
    OrphanVertex,
)

MAX_ENUMERATION = 10**7


class Vertex(tuple):
    """Label sequence of a vertex; the root is ``Vertex((1,))``.

    Ordering is plain tuple ordering, i.e. lexicographic with a prefix before
    its extensions.
    """

    __slots__ = ()

    def __new__(cls, labels: Iterable[int]) -> "Vertex":
        if isinstance(labels, str):
            return cls.parse(labels)
        labels = tuple(labels)
        if not labels:
            raise InvalidVertex("a vertex needs at least one label")
        for a in labels:
            if isinstance(a, bool) or not isinstance(a, (int, np.integer)):
                raise InvalidVertex(f"labels must be integers, got {a!r}")
        if labels[0] != 1:
            raise InvalidVertex(f"first label must be 1, got {labels[0]}")
        if min(labels) < 1:
            raise InvalidVertex(f"labels must be positive: {labels}")
        return super().__new__(cls, (int(a) for a in labels))

    @classmethod
    def parse(cls, text: str) -> "Vertex":
        """Parse dotted notation, ``"1.2.1"``."""
        try:
            return cls(int(part) for part in text.strip().split("."))
        except ValueError as exc:
            if isinstance(exc, InvalidVertex):
                raise
            raise InvalidVertex(f"malformed vertex {text!r}") from None

    @property
    def gen(self) -> int:
        return len(self)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def parent(self) -> "Vertex | None":
        if len(self) == 1:
            return None
        return Vertex(self[:-1])

    def child(self, a: int) -> "Vertex":
        return Vertex(self + (a,))

    def ancestors(self) -> list["Vertex"]:
        """Proper prefixes, root first."""
        return [Vertex(self[:k]) for k in range(1, len(self))]

    def check_arity(self, m: int) -> None:
        if max(self) > m:
            raise ArityViolation(f"vertex {self} has a label above m={m}")

    def __str__(self) -> str:
        return ".".join(map(str, self))

    def __repr__(self) -> str:
        return f"Vertex('{self}')"


ROOT = Vertex((1,))


def _as_vertex(v) -> Vertex:
    return v if isinstance(v, Vertex) else Vertex(v)


class Layout:
    """Heap indexing of the full m-ary tree truncated at generation ``K``.

    The root has index 0 and the children of index ``i`` are
    ``m*i + 1, ..., m*i + m``.  Inside a generation the order is
    lexicographic, and generation ``k`` occupies one contiguous block.
    """

    def __init__(self, m: int, K: int):
        if m < 1:
            raise ValueError(f"arity must be >= 1, got {m}")
        if K < 0:
            raise ValueError(f"depth cap must be >= 0, got {K}")
        self.m = m
        self.K = K
        sizes = [m ** (k - 1) for k in range(1, K + 1)]
        starts = [0]
        for s in sizes:
            starts.append(starts[-1] + s)
        self.size = starts[-1]
        self.gen_slices = [slice(starts[k], starts[k + 1]) for k in range(K)]

        vertices: list[Vertex] = []
        for k in range(1, K + 1):
            for tail in itertools.product(range(1, m + 1), repeat=k - 1):
                vertices.append(Vertex((1,) + tail))
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.gen = np.array([v.gen for v in self.vertices], dtype=np.int64)
        self.parent = np.array([(i - 1) // m if i else -1 for i in range(self.size)], dtype=np.int64)
        self.slot = np.array([v[-1] for v in self.vertices], dtype=np.int64)

    def __repr__(self) -> str:
        return f"Layout(m={self.m}, K={self.K}, size={self.size})"


@lru_cache(maxsize=64)
def layout(m: int, K: int) -> Layout:
    return Layout(m, K)


@dataclass(frozen=True)
class Tree:
    """Finite prefix-closed set of vertices of the full m-ary tree."""

    m: int
    vertices: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.vertices, frozenset) or not all(
            isinstance(v, Vertex) for v in self.vertices
        ):
            object.__setattr__(self, "vertices", frozenset(_as_vertex(v) for v in self.vertices))
        _check(self.vertices, self.m)

    @classmethod
    def empty(cls, m: int) -> "Tree":
        return cls(m, frozenset())

    @classmethod
    def full(cls, m: int, K: int) -> "Tree":
        return cls(m, frozenset(layout(m, K).vertices))

    @classmethod
    def from_indicator(cls, m: int, indicator: np.ndarray) -> "Tree":
        lay = layout(m, _depth_for_size(m, len(indicator)))
        return cls(m, frozenset(lay.vertices[i] for i in np.flatnonzero(indicator)))

    def __contains__(self, v) -> bool:
        return _as_vertex(v) in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(sorted(self.vertices))

    def __le__(self, other: "Tree") -> bool:
        return self.vertices <= other.vertices

    def __lt__(self, other: "Tree") -> bool:
        return self.vertices < other.vertices

    def __str__(self) -> str:
        terms = sorted(terminals(self))
        return ",".join(map(str, terms)) if terms else "-"

    def __repr__(self) -> str:
        return f"Tree(m={self.m}, terminals={str(self)!r})"

    def sort_key(self) -> tuple:
        return tuple(sorted(self.vertices))

    @cached_property
    def depth(self) -> int:
        return max((v.gen for v in self.vertices), default=0)

    def indicator(self, K: int) -> np.ndarray:
        """Boolean vector over :func:`layout` ``(m, K)``."""
        if self.depth > K:
            raise DepthExceeded(f"tree of depth {self.depth} exceeds cap {K}")
        lay = layout(self.m, K)
        out = np.zeros(lay.size, dtype=bool)
        for v in self.vertices:
            out[lay.index[v]] = True
        return out


def _depth_for_size(m: int, size: int) -> int:
    K, total = 0, 0
    while total < size:
        total += m**K
        K += 1
    if total != size:
        raise ValueError(f"{size} is not the vertex count of a truncated {m}-ary tree")
    return K


def _check(vertices: frozenset, m: int) -> None:
    for v in vertices:
        v.check_arity(m)
    for v in vertices:
        if len(v) > 1 and Vertex(v[:-1]) not in vertices:
            raise OrphanVertex(f"vertex {v} is present but its mother {Vertex(v[:-1])} is not")


def validate(candidate: Iterable, m: int) -> Tree:
    """Accept a vertex set iff it is prefix-closed and respects arity ``m``."""
    return Tree(m, frozenset(_as_vertex(v) for v in candidate))


def from_terminals(m: int, terminal_nodes: Iterable) -> Tree:
    """Smallest tree containing every listed vertex."""
    closure = set()
    for raw in terminal_nodes:
        v = _as_vertex(raw)
        v.check_arity(m)
        for k in range(1, len(v) + 1):
            closure.add(Vertex(v[:k]))
    return Tree(m, frozenset(closure))


def terminals(t: Tree) -> frozenset:
    """Vertices of ``t`` with no child in ``t``."""
    parents = {Vertex(v[:-1]) for v in t.vertices if len(v) > 1}
    return frozenset(t.vertices - parents)


def depth(t: Tree) -> int:
    return t.depth


def check_same_arity(*objs) -> int:
    arities = {o.m for o in objs}
    if len(arities) != 1:
        raise ArityMismatch(f"mixed arities {sorted(arities)}")
    return arities.pop()


def tree_count(m: int, K: int) -> int:
    """Number of trees of depth at most ``K``, the empty tree included."""
    s = 1
    for _ in range(K):
        s = 1 + s**m
    return s


def _subtrees(prefix: Vertex, remaining: int, m: int) -> list[tuple]:
    if remaining == 0:
        return [()]
    below = [_subtrees(prefix.child(a), remaining - 1, m) for a in range(1, m + 1)]
    out = [()]
    for combo in itertools.product(*below):
        out.append((prefix,) + tuple(itertools.chain.from_iterable(combo)))
    return out


def enumerate_vertex_lists(m: int, K: int) -> list[tuple]:
    """Sorted vertex tuples of all trees of depth <= K, in canonical order."""
    count = tree_count(m, K)
    if count > MAX_ENUMERATION:
        raise EnumerationTooLarge(f"{count} trees for m={m}, K={K} (limit {MAX_ENUMERATION})")
    lists = _subtrees(ROOT, K, m)
    lists.sort()
    return lists


def enumerate_trees(m: int, K: int) -> list[Tree]:
    """Every tree of depth at most ``K`` exactly once.

    Order is lexicographic on the sorted vertex lists, so the empty tree comes
    first and ``{1}`` second.
    """
    return [Tree(m, frozenset(vs)) for vs in enumerate_vertex_lists(m, K)]


@lru_cache(maxsize=16)
def enumerate_indicators(m: int, K: int) -> np.ndarray:
    """Indicator matrix, one row per tree, rows in :func:`enumerate_trees` order."""
    lists = enumerate_vertex_lists(m, K)
    lay = layout(m, K)
    out = np.zeros((len(lists), lay.size), dtype=bool)
    for row, vs in enumerate(lists):
        out[row, [lay.index[v] for v in vs]] = True
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TreeSample:
    """Ordered sample of trees sharing arity ``m`` and depth cap ``depth_cap``."""

    m: int
    depth_cap: int
    trees: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if self.depth_cap < 1:
            raise ValueError(f"depth cap must be positive, got {self.depth_cap}")
        for i, t in enumerate(self.trees):
            if t.m != self.m:
                raise ArityMismatch(f"tree {i} has arity {t.m}, sample has {self.m}")
            if t.depth > self.depth_cap:
                raise DepthExceeded(f"tree {i} has depth {t.depth} > cap {self.depth_cap}")

    @classmethod
    def from_indicators(cls, m: int, K: int, rows: np.ndarray) -> "TreeSample":
        lay = layout(m, K)
        verts = lay.vertices
        trees = tuple(
            Tree(m, frozenset(verts[i] for i in np.flatnonzero(r))) for r in np.asarray(rows, dtype=bool)
        )
        sample = cls(m, K, trees)
        object.__setattr__(sample, "_indicators", np.array(rows, dtype=bool))
        return sample

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __getitem__(self, i):
        return self.trees[i]

    @property
    def n(self) -> int:
        return len(self.trees)

    def indicators(self) -> np.ndarray:
        """``(n, layout.size)`` boolean matrix, cached."""
        cached = self.__dict__.get("_indicators")
        if cached is None:
            lay = layout(self.m, self.depth_cap)
            cached = np.zeros((len(self.trees), lay.size), dtype=bool)
            for row, t in enumerate(self.trees):
                for v in t.vertices:
                    cached[row, lay.index[v]] = True
            object.__setattr__(self, "_indicators", cached)
        return cached

    def counts(self) -> np.ndarray:
        """Number of trees containing each vertex."""
        return self.indicators().sum(axis=0, dtype=np.int64)


def as_sample(trees: Sequence[Tree], K: int) -> TreeSample:
    if not trees:
        raise ValueError("cannot infer arity from an empty list; build TreeSample directly")
    return TreeSample(trees[0].m, K, tuple(trees))
