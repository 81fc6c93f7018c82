"""``lipdist`` command line.

Exit codes: 0 exact/success, 1 input invalid, 2 budget-bracketed,
3 infinite distance, 4 an experiment check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .constructions import DiscretizationParams, SignVector, SignVectorError, interval_space, pulse_space
from .experiments import (
    ExperimentConfig,
    geometry_fixture_suite,
    lemma_ce2_experiment,
    lemma_ce_experiment,
    remark_ball_experiment,
)
from .io import FileFormatError, dump_space, json_text, load_map, load_space
from .metric import MetricStructureError, lipschitz_cost, validate_metric
from .solver import Budget, exact_distance

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BRACKETED = 2
EXIT_INFINITE = 3
EXIT_CHECK_FAILED = 4

EXPERIMENTS = ("ce", "ce2", "remark", "fixtures")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the 'input invalid' code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _eps_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _budget(args) -> Budget | None:
    if args.budget_nodes is None and args.budget_seconds is None:
        return None
    return Budget(args.budget_nodes, args.budget_seconds)


def _load_valid(path):
    space = load_space(path)
    violations = validate_metric(space)
    if violations:
        raise UsageError(f"{path}: not a metric space\n" + "\n".join(f"  {v}" for v in violations))
    return space


# -- subcommands -------------------------------------------------------------

def cmd_build(args) -> int:
    try:
        u = SignVector.parse(args.u, args.family)
    except SignVectorError as exc:
        raise UsageError(str(exc)) from None
    depth = args.N if args.N is not None else len(u)
    if len(u) != depth:
        raise UsageError(f"sign vector {args.u!r} has length {len(u)}, but --N is {depth}")
    params = DiscretizationParams(depth, args.k, args.eps)
    space = interval_space(u, params) if args.family == "interval" else pulse_space(u, params)
    out = Path(args.out) if args.out else Path(f"{space.name}.json")
    dump_space(space, out)
    print(f"wrote {out}: {space.n} points, diameter {space.diameter()!r}")
    return EXIT_OK


def cmd_validate(args) -> int:
    space = load_space(args.file)
    violations = validate_metric(space)
    if violations:
        print(f"{args.file}: {len(violations)} violation(s)")
        for v in violations:
            print(f"  {v}")
        return EXIT_INVALID
    print(f"{args.file}: valid metric space, {space.n} points")
    return EXIT_OK


def cmd_dilation(args) -> int:
    X, Y = _load_valid(args.source), _load_valid(args.target)
    f = load_map(args.map, X, Y)
    rep = lipschitz_cost(f)
    print(json_text({"source": X.name, "target": Y.name, "dil_forward": rep.dil_forward,
                     "dil_inverse": rep.dil_inverse, "cost": rep.cost}), end="")
    return EXIT_OK


def cmd_dist(args) -> int:
    X, Y = _load_valid(args.a), _load_valid(args.b)
    budget = Budget(max_nodes=0) if args.mode == "bound" else _budget(args)
    res = exact_distance(X, Y, budget, seed=args.seed)
    print(json_text(res.to_dict()), end="")
    return {"exact": EXIT_OK, "bracketed": EXIT_BRACKETED, "infinite": EXIT_INFINITE}[res.status]


def cmd_experiment(args) -> int:
    if args.name == "fixtures":
        result = geometry_fixture_suite()
    elif args.name == "remark":
        kwargs = {"u": args.u or "101", "samples": args.k if args.k is not None else 3}
        if args.eps is not None:
            kwargs["eps_list"] = args.eps
        if args.N is not None:
            kwargs["depth"] = args.N
        result = remark_ball_experiment(**kwargs)
    else:
        family = "interval" if args.name == "ce" else "pulse"
        cfg = ExperimentConfig(
            family=family,
            depth=args.N if args.N is not None else 3,
            samples=args.k if args.k is not None else 2,
            eps=tuple(args.eps) if args.eps is not None else (1.0,),
            mode="random" if args.sample else "exhaustive",
            count=args.sample or 8,
            seed=args.seed,
            budget=_budget(args),
            workers=args.workers,
        )
        result = (lemma_ce_experiment if args.name == "ce" else lemma_ce2_experiment)(cfg)

    csv_path, json_path = result.write(args.out)
    print(f"wrote {csv_path} and {json_path}")
    for key, value in result.headline.items():
        print(f"{key}: {value!r}")
    for key, ok in result.checks.items():
        print(f"check {key}: {'pass' if ok else 'FAIL'}")
    if not result.passed:
        return EXIT_CHECK_FAILED
    return EXIT_BRACKETED if result.bracketed else EXIT_OK


# -- parser ------------------------------------------------------------------

def _add_budget(p):
    p.add_argument("--budget-nodes", type=int, default=None, help="node limit for branch and bound")
    p.add_argument("--budget-seconds", type=float, default=None, help="wall-clock limit in seconds")
    p.add_argument("--seed", type=int, default=0, help="local-search seed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lipdist", description="Lipschitz distance between finite metric spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="construct an interval or pulse space and write a space file")
    p.add_argument("family", choices=("interval", "pulse"))
    p.add_argument("u", help="sign vector as a digit string, e.g. 121 or 0101")
    p.add_argument("--N", type=int, default=None, help="depth (defaults to len(u))")
    p.add_argument("--k", type=int, default=2, help="samples per linear piece (>= 2)")
    p.add_argument("--eps", type=float, default=1.0, help="pulse slope in (0, 1]")
    p.add_argument("--out", default=None, help="output path (default <name>.json)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("validate", help="check the metric axioms of a space file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dilation", help="dilations and cost of a map file")
    p.add_argument("map")
    p.add_argument("--source", required=True, help="source space file")
    p.add_argument("--target", required=True, help="target space file")
    p.set_defaults(func=cmd_dilation)

    p = sub.add_parser("dist", help="Lipschitz distance between two space files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mode", choices=("exact", "bound"), default="exact")
    _add_budget(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("bound", help="spectrum lower bound and local-search upper bound only")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--seed", type=int, default=0, help="local-search seed")
    p.set_defaults(func=cmd_dist, mode="bound")

    p = sub.add_parser("experiment", help="run a desk-scale experiment and write CSV + JSON")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--N", type=int, default=None, help="depth")
    p.add_argument("--k", type=int, default=None, help="samples per linear piece")
    p.add_argument("--eps", type=_eps_list, default=None, help="comma-separated slopes")
    p.add_argument("--u", default=None, help="sign vector for 'remark' (default 101)")
    p.add_argument("--sample", type=int, default=None, metavar="COUNT",
                   help="use COUNT random sign vectors instead of all of them")
    p.add_argument("--workers", type=int, default=1, help="processes for pair-level parallelism")
    p.add_argument("--out", default="results", help="output directory")
    _add_budget(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SignVectorError, FileFormatError, MetricStructureError, ValueError,
            json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"lipdist {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
