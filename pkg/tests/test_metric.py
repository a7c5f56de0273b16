import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import trees
from oracles import sym_diff_distance
from treestat.errors import ArityMismatch, CLTUnsafe, DepthExceeded, EmptySample
from treestat.metric import (
    MetricParams,
    distance,
    distance_otter_neveu,
    g_empirical,
    g_from_marginals,
    generation_mass,
    phi,
)
from treestat.sampling import MarginalProfile
from treestat.statistic import empirical_marginals, truncation_bound
from treestat.tree_core import Tree, TreeSample, enumerate_trees, from_terminals

A = from_terminals(2, ["1.1.1", "1.2"])
B = from_terminals(2, ["1.1", "1.2.1"])
P3 = MetricParams.geometric(2, 0.3, 3)


class TestParams:
    def test_phi(self):
        assert phi(P3, 3) == pytest.approx(0.027, abs=1e-15)
        assert phi(P3, 1) == pytest.approx(0.3, abs=1e-15)
        ones = MetricParams.per_generation(2, (1, 1, 1))
        assert phi(ones, 3) == 1

    def test_beyond_table(self):
        with pytest.raises(ValueError):
            MetricParams.per_generation(2, (1, 1, 1)).phi(4)

    def test_clt_bound(self):
        with pytest.raises(CLTUnsafe):
            MetricParams.geometric(2, 0.36, 3)
        relaxed = MetricParams.geometric_relaxed(2, 0.4, 3)
        assert not relaxed.clt_safe
        assert MetricParams.geometric_relaxed(2, 0.3, 3).clt_safe

    def test_per_generation_positive(self):
        with pytest.raises(ValueError):
            MetricParams.per_generation(2, (1, 0, 1))


class TestDistance:
    def test_reference_pair(self):
        assert distance(A, B, P3) == pytest.approx(0.054, abs=1e-12)
        assert distance(A, B, P3) == pytest.approx(P3.phi(3) + P3.phi(3), abs=1e-15)

    def test_identity(self):
        assert distance(A, A, P3) == 0

    def test_unit_weight_example(self):
        unit = MetricParams.per_generation(2, (1, 1, 1))
        x = from_terminals(2, ["1.1", "1.2"])
        c = from_terminals(2, ["1.1.1", "1.1.2", "1.2.1", "1.2.2"])
        assert distance(x, c, unit) == 4

    def test_arity_and_depth_checks(self):
        with pytest.raises(ArityMismatch):
            distance(A, from_terminals(3, ["1.3"]), P3)
        with pytest.raises(DepthExceeded):
            distance(A, from_terminals(2, ["1.1.1.1"]), P3)

    @settings(max_examples=200)
    @given(trees(2, 3), trees(2, 3), trees(2, 3))
    def test_metric_axioms(self, x, y, w):
        dxy = distance(x, y, P3)
        assert dxy == distance(y, x, P3)
        assert (dxy == 0) == (x == y)
        assert distance(x, w, P3) <= dxy + distance(y, w, P3) + 1e-15

    @given(trees(2, 3), trees(2, 3))
    def test_matches_oracle(self, x, y):
        assert distance(x, y, P3) == pytest.approx(sym_diff_distance(x, y, lambda k: 0.3**k), abs=1e-15)

    @given(trees(2, 4), trees(2, 4))
    def test_additive_over_generations(self, x, y):
        P4 = MetricParams.geometric(2, 0.3, 4)
        per_gen = 0.0
        for k in range(1, 5):
            xs = {v for v in x.vertices if v.gen == k}
            ys = {v for v in y.vertices if v.gen == k}
            per_gen += len(xs ^ ys) * 0.3**k
        assert distance(x, y, P4) == pytest.approx(per_gen, abs=1e-14)


class TestOtterNeveu:
    def test_equal(self):
        assert distance_otter_neveu(A, A) == 0

    def test_reference_pair(self):
        assert distance_otter_neveu(A, B) == pytest.approx(0.135335283, abs=1e-9)
        assert distance_otter_neveu(A, B) == pytest.approx(math.exp(-2), abs=1e-15)

    def test_root_difference(self):
        assert distance_otter_neveu(Tree.empty(2), from_terminals(2, ["1"])) == 1


class TestExpectedDistance:
    profile = MarginalProfile.from_mapping(2, 2, {"1": 1.0, "1.1": 0.6, "1.2": 0.2})
    P2 = MetricParams.geometric(2, 0.3, 2)

    def test_closed_form_example(self):
        y = from_terminals(2, ["1.1"])
        assert g_from_marginals(y, self.profile, self.P2) == pytest.approx(0.054, abs=1e-12)
        assert g_from_marginals(y, self.profile, self.P2) == pytest.approx(
            0.3 * 0 + 0.09 * 0.4 + 0.09 * 0.2, abs=1e-15
        )

    def test_full_tree_certain(self):
        full = Tree.full(2, 3)
        ones = MarginalProfile.indicator(full, 3)
        assert g_from_marginals(full, ones, P3) == 0

    @given(trees(2, 3), trees(2, 3))
    def test_point_mass_reduces_to_distance(self, x, y):
        prof = MarginalProfile.indicator(x, 3)
        assert g_from_marginals(y, prof, P3) == pytest.approx(distance(x, y, P3), abs=1e-15)

    def test_empirical_two_trees(self):
        s = TreeSample(2, 2, (Tree.empty(2), from_terminals(2, ["1"])))
        assert g_empirical(Tree.empty(2), s, self.P2) == pytest.approx(0.15, abs=1e-15)

    def test_empirical_copies(self):
        s = TreeSample(2, 3, (A,) * 5)
        assert g_empirical(B, s, P3) == pytest.approx(distance(A, B, P3), abs=1e-15)

    def test_empty_sample(self):
        with pytest.raises(EmptySample):
            g_empirical(A, TreeSample(2, 3, ()), P3)

    def test_exponent(self):
        s = TreeSample(2, 2, (Tree.empty(2), from_terminals(2, ["1"])))
        assert g_empirical(Tree.empty(2), s, self.P2, exponent=2) == pytest.approx(0.045, abs=1e-15)
        with pytest.raises(ValueError):
            g_empirical(A, s, self.P2, exponent=0.5)

    def test_empirical_equals_closed_form_at_empirical_marginals(self):
        rng = np.random.default_rng(7)
        all_trees = enumerate_trees(2, 3)
        for _ in range(100):
            n = int(rng.integers(1, 12))
            sample = TreeSample(2, 3, tuple(all_trees[i] for i in rng.integers(0, len(all_trees), n)))
            y = all_trees[int(rng.integers(0, len(all_trees)))]
            direct = g_empirical(y, sample, P3)
            closed = g_from_marginals(y, empirical_marginals(sample), P3)
            assert direct == pytest.approx(closed, abs=1e-12)

    @settings(max_examples=100)
    @given(
        st.lists(st.floats(0, 1), min_size=7, max_size=7),
        trees(2, 3),
        trees(2, 3),
    )
    def test_lipschitz(self, raw, y, t):
        # monotone profile: each vertex at most its mother
        probs = list(raw)
        for i in range(1, 7):
            probs[i] = min(probs[i], probs[(i - 1) // 2])
        prof = MarginalProfile(2, 3, probs)
        gap = abs(g_from_marginals(y, prof, P3) - g_from_marginals(t, prof, P3))
        assert gap <= distance(y, t, P3) + 1e-15


class TestTail:
    @pytest.mark.parametrize("k", [1, 2, 3, 6])
    def test_generation_mass(self, k):
        assert generation_mass(P3, k) == pytest.approx(2 ** (k - 1) * 0.3**k, rel=1e-14)

    def test_tail_identity(self):
        P = MetricParams.geometric(2, 0.3, 6)
        brute = math.fsum(2 ** (i - 1) * 0.3**i for i in range(7, 200))
        assert truncation_bound(P) == pytest.approx(brute, abs=1e-15)
