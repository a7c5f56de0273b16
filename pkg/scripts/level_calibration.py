"""Empirical level of the one-sample test when the data follow the null model."""

import argparse
import time

from treestat import GWModel, MetricParams, RngSpec
from treestat.experiments import level


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, default=0.6)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--z", type=float, default=0.3)
    ap.add_argument("-n", type=int, default=500)
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("-B", type=int, default=1000)
    ap.add_argument("-R", type=int, default=500)
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()

    params = MetricParams.geometric(2, args.z, args.depth)
    start = time.perf_counter()
    rate = level(GWModel.perslot([args.rho, args.rho]), args.n, args.alpha, args.B, args.R, params, RngSpec(args.seed))
    print(f"rejections={rate.rejections} replications={rate.replications} rate={rate.rate:.4f} alpha={args.alpha}")
    print(f"seconds={time.perf_counter() - start:.1f}")


if __name__ == "__main__":
    main()
