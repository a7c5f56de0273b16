"""Independent brute-force oracles.

These evaluate tree laws by enumerating every tree of depth <= K and
computing its probability straight from the generative description, so they
share nothing with the closed-form marginal and covariance code they check.
"""

import itertools
import math

from treestat.tree_core import Tree, Vertex, enumerate_trees


def tree_probability(model, t: Tree, K: int) -> float:
    """Probability that ``model`` truncated at generation K produces exactly ``t``."""
    from treestat.sampling import PerSlot

    root = Vertex((1,))
    if root not in t.vertices:
        return 1.0 - model.root_prob
    prob = model.root_prob
    m = model.m
    for v in t.vertices:
        if v.gen >= K:
            continue
        present = [a for a in range(1, m + 1) if v.child(a) in t.vertices]
        if isinstance(model.offspring, PerSlot):
            for a in range(1, m + 1):
                rho = model.offspring.probs[a - 1]
                prob *= rho if a in present else 1.0 - rho
        else:
            if present != list(range(1, len(present) + 1)):
                return 0.0
            prob *= model.offspring.masses[len(present)]
    return prob


def law(model, K):
    """``[(tree, probability)]`` over every tree of depth <= K."""
    return [(t, tree_probability(model, t, K)) for t in enumerate_trees(model.m, K)]


def sym_diff_distance(x: Tree, y: Tree, weight_of_gen) -> float:
    return math.fsum(weight_of_gen(v.gen) for v in x.vertices ^ y.vertices)


def expected(model, K, fn):
    return math.fsum(p * fn(t) for t, p in law(model, K))


def marginal_by_enumeration(model, K, v) -> float:
    return expected(model, K, lambda t: float(v in t.vertices))


def covariance_by_enumeration(model, K, s, t, weight_of_gen) -> float:
    pairs = law(model, K)
    ds = [sym_diff_distance(x, s, weight_of_gen) for x, _ in pairs]
    dt = [sym_diff_distance(x, t, weight_of_gen) for x, _ in pairs]
    ps = [p for _, p in pairs]
    es = math.fsum(p * a for p, a in zip(ps, ds))
    et = math.fsum(p * b for p, b in zip(ps, dt))
    return math.fsum(p * (a - es) * (b - et) for p, a, b in zip(ps, ds, dt))


def sup_by_enumeration(p_hat: dict, p_null: dict, m: int, K: int, weight_of_gen) -> float:
    """``max_y |g_hat(y) - g_null(y)|`` with g from marginals, over every tree."""

    def g(y, marg):
        return math.fsum(
            weight_of_gen(v.gen) * ((1 - marg.get(v, 0.0)) if v in y.vertices else marg.get(v, 0.0))
            for v in all_vertices(m, K)
        )

    return max(abs(g(y, p_hat) - g(y, p_null)) for y in enumerate_trees(m, K))


def all_vertices(m, K):
    out = []
    for k in range(1, K + 1):
        for tail in itertools.product(range(1, m + 1), repeat=k - 1):
            out.append(Vertex((1,) + tail))
    return out


def tail_partial_sum(m, z, K, terms):
    return math.fsum(m ** (i - 1) * z**i for i in range(K + 1, K + 1 + terms))


def count_trees_recursive(m, K):
    """Count prefix-closed subsets of the depth-K full tree by direct recursion."""
    if K == 0:
        return 1
    return 1 + count_trees_recursive(m, K - 1) ** m
