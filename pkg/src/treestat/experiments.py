"""Simulation experiments: law of large numbers, CLT covariance, level and power.

Each replication ``r`` uses ``rng.child(r)``; inside it the data draw and the
calibration draw use separate children, so no replication reuses a stream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .inference import CLTReport, clt_covariance_check, test_one_sample, test_two_sample
from .mean import MeanInterval, empirical_mean, mean_from_marginals
from .metric import MetricParams
from .sampling import RngSpec, marginal_profile, sample_trees
from .tree_core import Tree


@dataclass(frozen=True)
class RejectionRate:
    rejections: int
    replications: int

    @property
    def rate(self) -> float:
        return self.rejections / self.replications


@dataclass(frozen=True)
class LLNResult:
    empirical: MeanInterval
    theoretical: MeanInterval

    @property
    def agree(self) -> bool:
        return self.empirical == self.theoretical


def lln_mean(model, n: int, params: MetricParams, rng: RngSpec) -> LLNResult:
    sample = sample_trees(model, params.depth_cap, n, rng.stream(0))
    return LLNResult(
        empirical_mean(sample, params),
        mean_from_marginals(marginal_profile(model, params.depth_cap), params),
    )


def clt_covariance(model, probes: list[Tree], n: int, R: int, params: MetricParams, rng: RngSpec) -> CLTReport:
    return clt_covariance_check(model, probes, n, R, params, rng)


def level(model0, n: int, alpha: float, B: int, R: int, params: MetricParams, rng: RngSpec) -> RejectionRate:
    """Rejection rate of the one-sample test when the data follow ``model0``."""
    rejections = 0
    for r in range(R):
        rep = rng.child(r)
        sample = sample_trees(model0, params.depth_cap, n, rep.child(0).stream(0))
        report = test_one_sample(sample, model0, alpha, B, params, rep.child(1))
        rejections += report.reject
    return RejectionRate(rejections, R)


def two_sample_power(
    model_a, model_b, n_a: int, n_b: int, alpha: float, P: int, R: int, params: MetricParams, rng: RngSpec
) -> RejectionRate:
    """Rejection rate of the permutation test on samples from two models."""
    rejections = 0
    K = params.depth_cap
    for r in range(R):
        rep = rng.child(r)
        a = sample_trees(model_a, K, n_a, rep.child(0).stream(0))
        b = sample_trees(model_b, K, n_b, rep.child(0).stream(1))
        rejections += test_two_sample(a, b, alpha, P, params, rep.child(1)).reject
    return RejectionRate(rejections, R)
