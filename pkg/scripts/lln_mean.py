"""Empirical d-mean versus the mean predicted from exact marginals, over growing n."""

import argparse

from treestat import GWModel, MetricParams, RngSpec, format_tree
from treestat.experiments import lln_mean


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, default=0.8)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--z", type=float, default=0.3)
    ap.add_argument("--sizes", default="10,100,1000,10000,100000")
    ap.add_argument("--seed", type=int, default=6)
    args = ap.parse_args()

    params = MetricParams.geometric(2, args.z, args.depth)
    model = GWModel.perslot([args.rho, args.rho])
    for n in map(int, args.sizes.split(",")):
        res = lln_mean(model, n, params, RngSpec(args.seed, (n,)))
        emp = res.empirical
        print(f"n={n} lower={format_tree(emp.lower)} upper={format_tree(emp.upper)} agree={res.agree}")
    print(f"theoretical={format_tree(res.theoretical.lower)}")


if __name__ == "__main__":
    main()
