"""Monte-Carlo calibrated goodness-of-fit and two-sample tests.

Every replicate (null sample, permutation, CLT draw) gets its own generator
``rng.stream(i)``, so results never depend on evaluation order and extending
``B`` keeps the earlier replicates unchanged.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ArityMismatch, CLTUnsafe, DepthExceeded, UnsupportedModel
from .metric import MetricParams, g_from_marginals
from .sampling import GWModel, PerSlot, PointMass, RngSpec, exact_cov, marginal_profile, sample_indicators
from .statistic import (
    DeltaProfile,
    empirical_marginals,
    one_sample_sup,
    sup_deviation_batch,
    two_sample_factor,
    two_sample_sup,
    truncation_bound,
)
from .tree_core import Tree, TreeSample

__all__ = [
    "NullDistribution",
    "TestReport",
    "CLTReport",
    "simulate_null",
    "critical_value",
    "p_value",
    "test_one_sample",
    "test_two_sample",
    "clt_covariance_check",
    "MIN_REPLICATES",
]

MIN_REPLICATES = 100


@dataclass(frozen=True)
class NullDistribution:
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def B(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class TestReport:
    statistic: float
    critical_value: float
    p_value: float
    alpha: float
    reject: bool
    truncation_bound_scaled: float | None
    witness: Tree | None = None
    metadata: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def lines(self) -> list[str]:
        """``key=value`` lines for machine-readable output."""
        out = [
            f"statistic={self.statistic!r}",
            f"critical_value={self.critical_value!r}",
            f"p_value={self.p_value!r}",
            f"alpha={self.alpha!r}",
            f"reject={str(self.reject).lower()}",
            f"truncation_bound_scaled={self.truncation_bound_scaled!r}",
        ]
        if self.witness is not None:
            out.append(f"witness={self.witness}")
        out.extend(f"{k}={v}" for k, v in self.metadata.items())
        return out


def _require_inference_params(params: MetricParams) -> None:
    if not params.is_geometric or not params.clt_safe:
        raise CLTUnsafe("inference needs geometric weights with 0 < z < m^-3/2")


def _scaled_tail(params: MetricParams, factor: float) -> float | None:
    return factor * truncation_bound(params) if params.is_geometric else None


def simulate_null(model0, n: int, B: int, params: MetricParams, rng: RngSpec) -> NullDistribution:
    """``B`` one-sample statistics of fresh size-``n`` samples from ``model0``."""
    _require_inference_params(params)
    if B < MIN_REPLICATES:
        raise ValueError(f"need B >= {MIN_REPLICATES}, got {B}")
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if model0.m != params.m:
        raise ArityMismatch(f"model arity {model0.m} != metric arity {params.m}")
    K = params.depth_cap
    p0 = marginal_profile(model0, K).probs
    deltas = np.empty((B, len(p0)))
    for i in range(B):
        counts = sample_indicators(model0, K, n, rng.stream(i)).sum(axis=0, dtype=np.int64)
        deltas[i] = counts / n - p0
    values = math.sqrt(n) * sup_deviation_batch(deltas, params)
    meta = dict(model=model0.describe(), n=n, m=params.m, depth=K, z=params.z, seed=rng.seed, B=B)
    return NullDistribution(values, meta)


def read_null_compatible(null: NullDistribution, n: int, params: MetricParams) -> NullDistribution:
    """Check that a stored null distribution fits the sample size and metric."""
    meta = null.metadata
    expected = dict(n=n, m=params.m, depth=params.depth_cap)
    for key, value in expected.items():
        if key in meta and int(meta[key]) != value:
            raise ValueError(f"null distribution has {key}={meta[key]}, expected {value}")
    if "z" in meta and not math.isclose(float(meta["z"]), params.z, rel_tol=1e-12):
        raise ValueError(f"null distribution has z={meta['z']}, expected {params.z}")
    return null


def critical_value(null: NullDistribution, alpha: float) -> float:
    """The ``ceil((1 - alpha) B)``-th smallest null value."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if null.B < MIN_REPLICATES:
        raise ValueError(f"need at least {MIN_REPLICATES} null values, got {null.B}")
    # round first so that e.g. 0.95 * 100 does not become 96 through 95.00000000000001
    k = math.ceil(round((1 - alpha) * null.B, 9))
    return float(null.values[min(max(k, 1), null.B) - 1])


def p_value(null: NullDistribution, observed: float) -> float:
    """``(1 + #{b : value_b >= observed}) / (B + 1)``."""
    count = null.B - int(np.searchsorted(null.values, observed, side="left"))
    return (1 + count) / (null.B + 1)


def _bootstrap_null(sample: TreeSample, B: int, params: MetricParams, rng: RngSpec) -> NullDistribution:
    warnings.warn(
        "bootstrap calibration is experimental: its validity for this statistic is not established",
        stacklevel=3,
    )
    ind = sample.indicators()
    n = sample.n
    p_hat = ind.mean(axis=0)
    deltas = np.empty((B, ind.shape[1]))
    for i in range(B):
        idx = rng.stream(i).integers(0, n, size=n)
        deltas[i] = ind[idx].sum(axis=0, dtype=np.int64) / n - p_hat
    values = math.sqrt(n) * sup_deviation_batch(deltas, params)
    meta = dict(model="bootstrap", n=n, m=params.m, depth=params.depth_cap, z=params.z, seed=rng.seed, B=B)
    return NullDistribution(values, meta)


def test_one_sample(
    sample: TreeSample,
    model0,
    alpha: float,
    B: int,
    params: MetricParams,
    rng: RngSpec,
    null: NullDistribution | None = None,
    calibration: str = "montecarlo",
) -> TestReport:
    """Goodness-of-fit test of ``sample`` against the tree law ``model0``.

    Rejects iff the statistic exceeds the Monte-Carlo critical value.  A
    precomputed ``null`` is reused when given (its ``n`` must match).
    """
    _require_inference_params(params)
    if sample.depth_cap > params.depth_cap or any(t.depth > params.depth_cap for t in sample):
        raise DepthExceeded(f"sample deeper than the depth cap {params.depth_cap}")
    if sample.depth_cap != params.depth_cap:
        sample = TreeSample(sample.m, params.depth_cap, sample.trees)
    p0 = marginal_profile(model0, params.depth_cap)
    sup = one_sample_sup(sample, p0, params)
    root_n = math.sqrt(sample.n)
    stat = root_n * sup.value

    if null is None:
        if calibration == "montecarlo":
            null = simulate_null(model0, sample.n, B, params, rng)
        elif calibration == "bootstrap":
            null = _bootstrap_null(sample, B, params, rng)
        else:
            raise ValueError(f"unknown calibration {calibration!r}")
    elif null.metadata.get("n", sample.n) != sample.n:
        raise ValueError(f"null distribution was simulated for n={null.metadata['n']}, sample has {sample.n}")

    q = critical_value(null, alpha)
    meta = dict(n=sample.n, B=null.B, calibration=calibration, model=model0.describe())
    return TestReport(
        statistic=stat,
        critical_value=q,
        p_value=p_value(null, stat),
        alpha=alpha,
        reject=stat > q,
        truncation_bound_scaled=_scaled_tail(params, root_n),
        witness=sup.witness,
        metadata=meta,
    )


def _canonical_rows(ind: np.ndarray) -> np.ndarray:
    order = np.lexsort(ind.T[::-1])
    return ind[order]


def permutation_null(
    sample1: TreeSample, sample2: TreeSample, P: int, params: MetricParams, rng: RngSpec
) -> NullDistribution:
    """Two-sample statistics over random re-splits of the pooled sample.

    The pooled sample is put in canonical order first and the first block of
    each permutation always has the smaller size, so the result does not
    depend on which sample is called first or on the order inside samples.
    """
    K = params.depth_cap
    n1, n2 = sample1.n, sample2.n
    pooled = _canonical_rows(
        np.vstack([TreeSample(sample1.m, K, sample1.trees).indicators(),
                   TreeSample(sample2.m, K, sample2.trees).indicators()])
    )
    total = pooled.sum(axis=0, dtype=np.int64)
    small, big = min(n1, n2), max(n1, n2)
    N = n1 + n2
    deltas = np.empty((P, pooled.shape[1]))
    for i in range(P):
        perm = rng.stream(i).permutation(N)
        c_small = pooled[perm[:small]].sum(axis=0, dtype=np.int64)
        deltas[i] = c_small / small - (total - c_small) / big
    values = two_sample_factor(n1, n2) * sup_deviation_batch(deltas, params)
    meta = dict(model="permutation", n=small, n2=big, m=params.m, depth=K, z=params.z, seed=rng.seed, B=P)
    return NullDistribution(values, meta)


def test_two_sample(
    sample1: TreeSample,
    sample2: TreeSample,
    alpha: float,
    P: int,
    params: MetricParams,
    rng: RngSpec,
) -> TestReport:
    """Permutation test of equal laws for two samples of trees."""
    _require_inference_params(params)
    if P < MIN_REPLICATES:
        raise ValueError(f"need P >= {MIN_REPLICATES}, got {P}")
    sup = two_sample_sup(sample1, sample2, params)
    factor = two_sample_factor(sample1.n, sample2.n)
    stat = factor * sup.value
    null = permutation_null(sample1, sample2, P, params, rng)
    q = critical_value(null, alpha)
    return TestReport(
        statistic=stat,
        critical_value=q,
        p_value=p_value(null, stat),
        alpha=alpha,
        reject=stat > q,
        truncation_bound_scaled=_scaled_tail(params, factor),
        witness=sup.witness,
        metadata=dict(n1=sample1.n, n2=sample2.n, P=P),
    )


@dataclass(frozen=True)
class CLTReport:
    empirical: np.ndarray
    exact: np.ndarray
    deviation: np.ndarray
    standard_error: np.ndarray
    lipschitz_ok: bool
    R: int
    n: int

    @property
    def max_abs_deviation(self) -> float:
        return float(np.max(np.abs(self.deviation))) if self.deviation.size else 0.0


def _fsum_cov(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    R, P = w.shape
    means = np.array([math.fsum(w[:, j]) / R for j in range(P)])
    centered = w - means
    cov = np.empty((P, P))
    se = np.empty((P, P))
    for a in range(P):
        for b in range(a, P):
            prod = centered[:, a] * centered[:, b]
            cov[a, b] = cov[b, a] = math.fsum(prod) / (R - 1)
            se[a, b] = se[b, a] = prod.std(ddof=1) / math.sqrt(R)
    return cov, se


def clt_covariance_check(
    model, probes: list[Tree], n: int, R: int, params: MetricParams, rng: RngSpec
) -> CLTReport:
    """Compare the covariance of ``sqrt(n)(g_n - g)`` at the probes with the exact one.

    Also checks on every sampled tree that the centered distance process is
    2-Lipschitz: ``|X(s) - X(t)| <= 2 d(s, t)``.
    """
    if isinstance(model, GWModel) and not isinstance(model.offspring, PerSlot):
        raise UnsupportedModel("exact covariance needs independent slots (PerSlot)")
    if not isinstance(model, (GWModel, PointMass)):
        raise UnsupportedModel(f"unknown tree law {model!r}")
    if R < 2:
        raise ValueError("need at least two realizations")
    K = params.depth_cap
    phi_v = params.vertex_weights
    profile = marginal_profile(model, K)
    probe_ind = np.array([t.indicator(K) for t in probes], dtype=bool)
    g = np.array([g_from_marginals(t, profile, params) for t in probes])
    pair_d = (probe_ind[:, None, :] ^ probe_ind[None, :, :]) @ phi_v
    root_n = math.sqrt(n)

    w = np.empty((R, len(probes)))
    lipschitz_ok = True
    bound = 2 * pair_d + 1e-12
    pending: list[np.ndarray] = []
    pending_rows = 0
    start = 0

    def flush(stop: int) -> None:
        # distances of every tree drawn in replicates start..stop-1, checked in one pass
        nonlocal lipschitz_ok, pending, pending_rows, start
        ind = np.concatenate(pending)
        d = (ind[:, None, :] ^ probe_ind[None, :, :]) @ phi_v
        x = d - g
        if lipschitz_ok and np.any(np.abs(x[:, :, None] - x[:, None, :]) > bound):
            lipschitz_ok = False
        w[start:stop] = root_n * (d.reshape(stop - start, n, -1).mean(axis=1) - g)
        pending, pending_rows, start = [], 0, stop

    for r in range(R):
        pending.append(sample_indicators(model, K, n, rng.stream(r)))
        pending_rows += n
        if pending_rows >= 50_000:
            flush(r + 1)
    if pending:
        flush(R)

    emp, se = _fsum_cov(w)
    exact = np.array([[exact_cov(model, s, t, params) for t in probes] for s in probes])
    return CLTReport(emp, exact, emp - exact, se, lipschitz_ok, R, n)


# keep pytest from collecting these when a test module imports them
test_one_sample.__test__ = False
test_two_sample.__test__ = False
