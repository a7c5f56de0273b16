import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import covariance_by_enumeration, marginal_by_enumeration
from treestat.errors import UnsupportedModel
from treestat.metric import MetricParams, distance
from treestat.sampling import (
    GWModel,
    MarginalProfile,
    PointMass,
    RngSpec,
    exact_cov,
    joint_presence,
    marginal_profile,
    sample_indicators,
    sample_tree,
    sample_trees,
)
from treestat.tree_core import Tree, Vertex, enumerate_trees, from_terminals, layout


def V(s):
    return Vertex.parse(s)


def gen(seed=0):
    return np.random.default_rng(seed)


probs01 = st.floats(0, 1)


@st.composite
def models(draw, m=2):
    root = draw(probs01)
    if draw(st.booleans()):
        return GWModel.perslot([draw(probs01) for _ in range(m)], root)
    raw = [draw(st.floats(0.01, 1)) for _ in range(m + 1)]
    total = sum(raw)
    masses = [x / total for x in raw]
    masses[-1] = 1.0 - math.fsum(masses[:-1])
    return GWModel.countfill(masses, root)


class TestModel:
    def test_binomial_is_perslot(self):
        m = GWModel.binomial(0.4)
        assert m.m == 2 and m.offspring.probs == (0.4, 0.4)

    def test_percolation(self):
        m = GWModel.percolation(0.3, 3)
        assert m.root_prob == 0.3 and m.offspring.probs == (0.3,) * 3

    def test_bad_masses(self):
        with pytest.raises(ValueError):
            GWModel.countfill([0.5, 0.6])
        with pytest.raises(ValueError):
            GWModel.perslot([1.2, 0.1])


class TestSampleTree:
    def test_root_absent(self):
        model = GWModel.perslot([0.9, 0.9], root_prob=0)
        for s in range(20):
            assert sample_tree(model, 4, gen(s)) == Tree.empty(2)

    def test_full_tree(self):
        model = GWModel.perslot([1, 1])
        for s in range(5):
            assert sample_tree(model, 3, gen(s)) == Tree.full(2, 3)

    def test_depth_cap(self):
        sample = sample_trees(GWModel.perslot([0.9, 0.9]), 3, 200, gen())
        assert max(t.depth for t in sample) <= 3

    def test_vertex_frequency(self):
        ind = sample_indicators(GWModel.perslot([0.6, 0.6]), 2, 10**6, gen(1))
        assert ind[:, 1].mean() == pytest.approx(0.6, abs=0.002)

    def test_countfill_frequency(self):
        ind = sample_indicators(GWModel.countfill([0.25, 0.5, 0.25]), 2, 10**6, gen(2))
        assert ind[:, 1].mean() == pytest.approx(0.75, abs=0.002)
        assert ind[:, 2].mean() == pytest.approx(0.25, abs=0.002)

    def test_countfill_left_filled(self):
        ind = sample_indicators(GWModel.countfill([0.2, 0.3, 0.3, 0.2]), 3, 2000, gen(3))
        lay = layout(3, 3)
        for i, v in enumerate(lay.vertices):
            if v.gen > 1 and v[-1] > 1:
                older = lay.index[Vertex(v[:-1] + (v[-1] - 1,))]
                # a present child in slot a implies its older sibling in slot a-1
                assert not np.any(ind[:, i] & ~ind[:, older])

    def test_point_mass(self):
        x = from_terminals(2, ["1.1.1", "1.2"])
        assert sample_tree(PointMass(x), 3, gen()) == x

    def test_prefix_closed(self):
        for t in sample_trees(GWModel.countfill([0.3, 0.3, 0.4]), 5, 300, gen(4)):
            for v in t.vertices:
                assert v.parent is None or v.parent in t


class TestMarginals:
    def test_perslot_products(self):
        p = 0.7
        prof = marginal_profile(GWModel.perslot([p, p]), 3)
        assert prof["1.1"] == pytest.approx(p)
        assert prof["1.1.1"] == pytest.approx(p * p)

    def test_countfill(self):
        prof = marginal_profile(GWModel.countfill([0.25, 0.5, 0.25]), 2)
        assert prof["1.1"] == pytest.approx(0.75, abs=1e-15)
        assert prof["1.2"] == pytest.approx(0.25, abs=1e-15)

    def test_countfill_certain(self):
        prof = marginal_profile(GWModel.countfill([0, 0, 1]), 4)
        assert np.all(prof.probs == 1)

    @pytest.mark.parametrize(
        "model",
        [
            GWModel.perslot([0.6, 0.3], 0.8),
            GWModel.countfill([0.25, 0.5, 0.25], 0.9),
            GWModel.countfill([0.1, 0.2, 0.3, 0.4]),
        ],
    )
    def test_against_enumeration(self, model):
        K = 3
        prof = marginal_profile(model, K)
        for v, p in prof.items():
            assert p == pytest.approx(marginal_by_enumeration(model, K, v), abs=1e-12)

    @settings(max_examples=60)
    @given(models())
    def test_monotone(self, model):
        prof = marginal_profile(model, 4)
        lay = layout(2, 4)
        assert np.all(prof.probs[1:] <= prof.probs[lay.parent[1:]] + 1e-15)

    def test_profile_rejects_increase(self):
        with pytest.raises(ValueError):
            MarginalProfile.from_mapping(2, 2, {"1": 0.5, "1.1": 0.6})


class TestPercolation:
    @staticmethod
    def root_cluster(xi, lay):
        keep = np.zeros_like(xi)
        keep[:, 0] = xi[:, 0]
        for i in range(1, lay.size):
            keep[:, i] = keep[:, lay.parent[i]] & xi[:, i]
        return keep

    def test_site_percolation_marginals(self):
        rho, K, n = 0.7, 4, 10**5
        lay = layout(2, K)
        xi = gen(5).random((n, lay.size)) < rho
        explicit = self.root_cluster(xi, lay)
        generated = sample_indicators(GWModel.percolation(rho, 2), K, n, gen(6))
        for i, v in enumerate(lay.vertices):
            target = rho**v.gen
            se = math.sqrt(target * (1 - target) / n)
            assert abs(explicit[:, i].mean() - target) < 3 * se + 1e-12
            assert abs(generated[:, i].mean() - target) < 3 * se + 1e-12


class TestJointPresence:
    model = GWModel.perslot([0.6, 0.4], 0.9)

    def test_diagonal(self):
        prof = marginal_profile(self.model, 3)
        assert joint_presence(self.model, "1.2.1", "1.2.1") == pytest.approx(prof["1.2.1"])

    def test_ancestor(self):
        prof = marginal_profile(self.model, 3)
        assert joint_presence(self.model, "1.1", "1.1.2") == pytest.approx(prof["1.1.2"])

    def test_siblings(self):
        model = GWModel.perslot([0.3, 0.3])
        assert joint_presence(model, "1.1", "1.2") == pytest.approx(0.09)

    def test_against_enumeration(self):
        K = 3
        from oracles import expected

        for u, v in [("1.1.1", "1.2.2"), ("1.1.2", "1.1.1"), ("1", "1.2.1"), ("1.2", "1.1.1")]:
            brute = expected(self.model, K, lambda t: float(V(u) in t.vertices and V(v) in t.vertices))
            assert joint_presence(self.model, u, v) == pytest.approx(brute, abs=1e-12)

    def test_countfill_unsupported(self):
        with pytest.raises(UnsupportedModel):
            joint_presence(GWModel.countfill([0.2, 0.3, 0.5]), "1.1", "1.2")


class TestExactCov:
    def test_single_bernoulli(self):
        params = MetricParams.geometric(2, 0.3, 1)
        model = GWModel.perslot([0.5, 0.5], root_prob=0.5)
        assert exact_cov(model, Tree.empty(2), Tree.empty(2), params) == pytest.approx(0.0225, abs=1e-15)

    def test_deterministic(self):
        params = MetricParams.geometric(2, 0.3, 3)
        model = GWModel.perslot([1, 0])
        for s in enumerate_trees(2, 2):
            for t in enumerate_trees(2, 2):
                assert exact_cov(model, s, t, params) == 0

    @pytest.mark.parametrize("model", [GWModel.perslot([0.6, 0.6]), GWModel.perslot([0.7, 0.2], 0.8)])
    def test_against_enumeration(self, model):
        params = MetricParams.geometric(2, 0.3, 3)
        rng = gen(8)
        all_trees = enumerate_trees(2, 3)
        for _ in range(10):
            s = all_trees[rng.integers(len(all_trees))]
            t = all_trees[rng.integers(len(all_trees))]
            brute = covariance_by_enumeration(model, 3, s, t, params.phi)
            assert exact_cov(model, s, t, params) == pytest.approx(brute, abs=1e-13)

    def test_symmetric_and_nonnegative(self):
        params = MetricParams.geometric(2, 0.3, 3)
        model = GWModel.perslot([0.6, 0.45], 0.9)
        trees = enumerate_trees(2, 2)
        for s in trees:
            assert exact_cov(model, s, s, params) >= 0
            for t in trees:
                assert exact_cov(model, s, t, params) == pytest.approx(exact_cov(model, t, s, params), abs=1e-15)

    def test_monte_carlo(self):
        params = MetricParams.geometric(2, 0.3, 3)
        model = GWModel.perslot([0.6, 0.6])
        s = from_terminals(2, ["1.1", "1.2.1"])
        ind = sample_indicators(model, 3, 10**6, gen(9))
        d = (ind ^ s.indicator(3)) @ params.vertex_weights
        centered = (d - d.mean()) ** 2
        se = centered.std(ddof=1) / math.sqrt(len(d))
        assert abs(centered.mean() - exact_cov(model, s, s, params)) < 3 * se

    def test_countfill_unsupported(self):
        params = MetricParams.geometric(2, 0.3, 2)
        with pytest.raises(UnsupportedModel):
            exact_cov(GWModel.countfill([0.2, 0.3, 0.5]), Tree.empty(2), Tree.empty(2), params)


class TestRng:
    def test_streams_reproducible(self):
        a = RngSpec(42).stream(3).random(5)
        b = RngSpec(42).stream(3).random(5)
        assert np.array_equal(a, b)

    def test_streams_distinct(self):
        spec = RngSpec(42)
        assert not np.array_equal(spec.stream(0).random(5), spec.stream(1).random(5))
        assert not np.array_equal(spec.stream(0).random(5), spec.child(0).stream(0).random(5))

    def test_frozen_value(self):
        # pins the stream derivation; changing it breaks stored fixtures
        assert RngSpec(2024).stream(0).integers(0, 10**9) == 677507234
        assert RngSpec(2024).child(1).stream(2).integers(0, 10**9) == 254782084
