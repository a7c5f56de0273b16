"""Empirical covariance of the scaled distance process at probe trees versus the exact one."""

import argparse

import numpy as np

from treestat import GWModel, MetricParams, RngSpec, Tree
from treestat.experiments import clt_covariance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, default=0.6)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--z", type=float, default=0.3)
    ap.add_argument("-n", type=int, default=2000)
    ap.add_argument("-R", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    params = MetricParams.geometric(2, args.z, args.depth)
    probes = [Tree.full(2, k) for k in range(args.depth + 1)]
    rep = clt_covariance(GWModel.perslot([args.rho, args.rho]), probes, args.n, args.R, params, RngSpec(args.seed))
    np.set_printoptions(precision=5, suppress=True)
    print("probes: full trees with", ", ".join(str(k) for k in range(args.depth + 1)), "generations")
    print("empirical\n", rep.empirical)
    print("exact\n", rep.exact)
    print("standard errors\n", rep.standard_error)
    print(f"max_abs_deviation={rep.max_abs_deviation:.5f} lipschitz_ok={rep.lipschitz_ok}")


if __name__ == "__main__":
    main()
