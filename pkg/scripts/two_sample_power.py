"""Power of the two-sample permutation test between two per-slot models."""

import argparse
import time

from treestat import GWModel, MetricParams, RngSpec
from treestat.experiments import two_sample_power


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho-a", type=float, default=0.5)
    ap.add_argument("--rho-b", type=float, default=0.8)
    ap.add_argument("--n-a", type=int, default=200)
    ap.add_argument("--n-b", type=int, default=200)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--z", type=float, default=0.3)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("-P", type=int, default=1000)
    ap.add_argument("-R", type=int, default=200)
    ap.add_argument("--seed", type=int, default=9)
    args = ap.parse_args()

    params = MetricParams.geometric(2, args.z, args.depth)
    start = time.perf_counter()
    rate = two_sample_power(
        GWModel.perslot([args.rho_a] * 2), GWModel.perslot([args.rho_b] * 2),
        args.n_a, args.n_b, args.alpha, args.P, args.R, params, RngSpec(args.seed),
    )
    print(f"rejections={rate.rejections} replications={rate.replications} power={rate.rate:.4f}")
    print(f"seconds={time.perf_counter() - start:.1f}")


if __name__ == "__main__":
    main()
