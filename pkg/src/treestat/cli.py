"""Command-line interface: ``treestat <subcommand> ...``.

Exit codes: 0 success (or H0 not rejected), 3 H0 rejected, 1 usage error,
2 data error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from . import io as tio
from .errors import TreeStatError
from .inference import (
    clt_covariance_check,
    read_null_compatible,
    simulate_null,
    test_one_sample,
    test_two_sample,
)
from .mean import brute_force_mean, empirical_mean
from .metric import MetricParams, distance, distance_otter_neveu
from .sampling import GWModel, PointMass, RngSpec, marginal_profile, sample_trees
from .statistic import one_sample_sup, truncation_bound

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_REJECT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated decimals, got {text!r}") from None


def parse_model(spec: str, root_prob: float = 1.0, m: int | None = None):
    """``perslot:<r1,..,rm>``, ``countfill:<q0,..,qm>`` or ``pointmass:<tree text>``."""
    kind, sep, body = spec.partition(":")
    if not sep:
        raise UsageError(f"model {spec!r} lacks a ':'")
    if kind == "perslot":
        model = GWModel.perslot(_floats(body), root_prob)
    elif kind == "countfill":
        model = GWModel.countfill(_floats(body), root_prob)
    elif kind == "pointmass":
        if m is None:
            raise UsageError("pointmass models need --m")
        model = PointMass(tio.parse_tree(body, m))
    else:
        raise UsageError(f"unknown model kind {kind!r}")
    if m is not None and model.m != m:
        raise UsageError(f"model has arity {model.m} but --m is {m}")
    return model


def _emit(args, pairs: list[tuple[str, object]], human: list[str] | None = None) -> None:
    if args.kv or human is None:
        for k, v in pairs:
            print(f"{k}={v}")
    else:
        for line in human:
            print(line)


def _fmt(x) -> str:
    return format(x, ".17g") if isinstance(x, float) else str(x)


def _model_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--model", required=required, help="perslot:<r..>|countfill:<q..>|pointmass:<tree>")
    p.add_argument("--root-prob", type=float, default=1.0)
    p.add_argument("--m", type=int, default=None)


def cmd_gen(args) -> int:
    model = parse_model(args.model, args.root_prob, args.m)
    sample = sample_trees(model, args.depth, args.n, RngSpec(args.seed).stream(0))
    if args.output:
        tio.write_sample(sample, args.output)
    else:
        tio.write_sample(sample, sys.stdout)
    return EXIT_OK


def cmd_dist(args) -> int:
    a = tio.parse_tree(args.tree_a, args.m)
    b = tio.parse_tree(args.tree_b, args.m)
    if args.otter_neveu:
        d = distance_otter_neveu(a, b)
    else:
        K = max(a.depth, b.depth, 1)
        if args.weights:
            params = MetricParams.per_generation(args.m, _floats(args.weights))
        elif args.z is not None:
            params = MetricParams.geometric_relaxed(args.m, args.z, K)
        else:
            raise UsageError("dist needs --z, --weights or --otter-neveu")
        d = distance(a, b, params)
    _emit(args, [("distance", _fmt(d))], [_fmt(d)])
    return EXIT_OK


def cmd_mean(args) -> int:
    sample = tio.read_sample(args.sample)
    params = MetricParams.geometric_relaxed(sample.m, args.z, sample.depth_cap)
    if args.brute_force or args.exponent != 1:
        if args.exponent != 1 and not args.brute_force:
            raise UsageError("--exponent other than 1 needs --brute-force")
        trees = brute_force_mean(sample, params, args.exponent)
        pairs = [("minimizers", len(trees))] + [(f"minimizer{i}", tio.format_tree(t)) for i, t in enumerate(trees)]
        _emit(args, pairs, [tio.format_tree(t) for t in trees])
        return EXIT_OK
    interval = empirical_mean(sample, params)
    lo, hi = tio.format_tree(interval.lower), tio.format_tree(interval.upper)
    _emit(args, [("lower", lo), ("upper", hi), ("unique", str(interval.is_unique).lower())],
          [f"lower {lo}", f"upper {hi}"])
    return EXIT_OK


def cmd_marginals(args) -> int:
    model = parse_model(args.model, args.root_prob, args.m)
    profile = marginal_profile(model, args.depth)
    tio.write_marginals(profile, args.output or sys.stdout)
    return EXIT_OK


def cmd_stat(args) -> int:
    sample = tio.read_sample(args.sample)
    if args.null_marginals:
        profile = tio.read_marginals(args.null_marginals)
    elif args.null_model:
        profile = marginal_profile(parse_model(args.null_model, args.root_prob, sample.m), sample.depth_cap)
    else:
        raise UsageError("stat needs --null-model or --null-marginals")
    if (profile.m, profile.depth) != (sample.m, sample.depth_cap):
        raise UsageError("null marginals and sample differ in arity or depth")
    params = MetricParams.geometric_relaxed(sample.m, args.z, sample.depth_cap)
    sup = one_sample_sup(sample, profile, params)
    root_n = math.sqrt(sample.n)
    stat = root_n * sup.value
    tail = root_n * truncation_bound(params) if sample.m * args.z < 1 else math.inf
    pairs = [
        ("statistic", _fmt(stat)),
        ("witness", tio.format_tree(sup.witness)),
        ("sign", sup.sign),
        ("truncation_bound_scaled", _fmt(tail)),
        ("n", sample.n),
    ]
    _emit(args, pairs, [f"{k}: {v}" for k, v in pairs])
    return EXIT_OK


def _report(args, report) -> int:
    if args.kv:
        for line in report.lines():
            print(line)
    else:
        print(f"statistic       {report.statistic:.6g}")
        print(f"critical value  {report.critical_value:.6g}  (alpha={report.alpha})")
        print(f"p-value         {report.p_value:.6g}")
        if report.truncation_bound_scaled is not None:
            print(f"depth-tail bound {report.truncation_bound_scaled:.3g}")
        if report.witness is not None:
            print(f"witness         {tio.format_tree(report.witness)}")
        print("decision        " + ("reject H0" if report.reject else "do not reject H0"))
    return EXIT_REJECT if report.reject else EXIT_OK


def cmd_test1(args) -> int:
    sample = tio.read_sample(args.sample)
    model = parse_model(args.null_model, args.root_prob, sample.m)
    params = MetricParams.geometric(sample.m, args.z, sample.depth_cap)
    null = None
    if args.null_dist:
        null = read_null_compatible(tio.read_null(args.null_dist), sample.n, params)
    calibration = "bootstrap" if args.experimental_bootstrap else "montecarlo"
    report = test_one_sample(sample, model, args.alpha, args.B, params, RngSpec(args.seed),
                             null=null, calibration=calibration)
    return _report(args, report)


def cmd_test2(args) -> int:
    a = tio.read_sample(args.sample_a)
    b = tio.read_sample(args.sample_b)
    if a.m != b.m or a.depth_cap != b.depth_cap:
        raise UsageError("samples differ in arity or depth")
    params = MetricParams.geometric(a.m, args.z, a.depth_cap)
    return _report(args, test_two_sample(a, b, args.alpha, args.P, params, RngSpec(args.seed)))


def cmd_nulldist(args) -> int:
    model = parse_model(args.model, args.root_prob, args.m)
    params = MetricParams.geometric(model.m, args.z, args.depth)
    null = simulate_null(model, args.n, args.B, params, RngSpec(args.seed))
    tio.write_null(null, args.output or sys.stdout)
    return EXIT_OK


def cmd_cltcheck(args) -> int:
    probes = tio.read_sample(args.probes)
    model = parse_model(args.model, args.root_prob, probes.m)
    params = MetricParams.geometric(probes.m, args.z, probes.depth_cap)
    rep = clt_covariance_check(model, list(probes), args.n, args.R, params, RngSpec(args.seed))
    pairs = [("max_abs_deviation", _fmt(rep.max_abs_deviation)), ("lipschitz_ok", str(rep.lipschitz_ok).lower())]
    P = len(probes)
    for i in range(P):
        for j in range(i, P):
            pairs.append((f"cov[{i},{j}]", f"{_fmt(float(rep.empirical[i, j]))} exact={_fmt(float(rep.exact[i, j]))}"))
    _emit(args, pairs)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treestat", description="Inference for random rooted trees.")
    parser.add_argument("--kv", action="store_true", help="print key=value lines")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="sample trees from a Galton-Watson model")
    _model_args(p)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dist", help="distance between two trees")
    p.add_argument("tree_a")
    p.add_argument("tree_b")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--z", type=float)
    p.add_argument("--weights", help="per-generation weights g1,g2,...")
    p.add_argument("--otter-neveu", action="store_true")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("mean", help="empirical d-mean of a sample")
    p.add_argument("sample")
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--exponent", type=float, default=1.0)
    p.add_argument("--brute-force", action="store_true")
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("marginals", help="exact vertex marginals of a model")
    _model_args(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_marginals)

    p = sub.add_parser("stat", help="one-sample sup statistic")
    p.add_argument("sample")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--null-model")
    group.add_argument("--null-marginals")
    p.add_argument("--root-prob", type=float, default=1.0)
    p.add_argument("--z", type=float, required=True)
    p.set_defaults(func=cmd_stat)

    p = sub.add_parser("test1", help="one-sample goodness-of-fit test")
    p.add_argument("sample")
    p.add_argument("--null-model", required=True)
    p.add_argument("--root-prob", type=float, default=1.0)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("-B", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--null-dist")
    p.add_argument("--experimental-bootstrap", action="store_true")
    p.set_defaults(func=cmd_test1)

    p = sub.add_parser("test2", help="two-sample permutation test")
    p.add_argument("sample_a")
    p.add_argument("sample_b")
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("-P", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_test2)

    p = sub.add_parser("nulldist", help="simulate and save a null distribution")
    _model_args(p)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-B", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_nulldist)

    p = sub.add_parser("cltcheck", help="compare empirical and exact covariance at probe trees")
    _model_args(p)
    p.add_argument("--probes", required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-R", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cltcheck)

    for p in sub.choices.values():
        p.add_argument("--kv", action="store_true", default=argparse.SUPPRESS, help="print key=value lines")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"treestat: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TreeStatError, ValueError, OSError) as exc:
        print(f"treestat: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
