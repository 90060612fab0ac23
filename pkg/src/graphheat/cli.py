"""Command-line front end: ``graphheat <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import spectral
from .graph import (
    GraphPoint,
    InvalidGraph,
    RegionSpec,
    add_dirichlet,
    attach_pendant,
    lengthen_edge,
    load_graph,
    midpoint_loop_cut,
    mirror,
    save_graph,
    scale,
    subdivide,
)
from .heat import EvalConfig, boundary_flux, hadamard_derivative, heat_content, heat_kernel
from .paths import BudgetExceeded
from .verify import SUITES, run_suites

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _point(text: str) -> GraphPoint:
    try:
        e, off = text.split(":")
        return GraphPoint(int(e), float(off))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected EDGE:OFFSET, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("GRAPHHEAT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _cfg(args) -> EvalConfig:
    return EvalConfig(
        tolerance=args.tol,
        max_terms=int(args.max_terms),
        method=getattr(args, "method", "auto"),
        threads=_threads(args),
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values (flags win)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (env GRAPHHEAT_THREADS)")
    common.add_argument("--tol", type=float, default=1e-10, help="absolute tolerance")
    common.add_argument("--max-terms", type=float, default=1e7, help="state budget for path sums")

    p = argparse.ArgumentParser(prog="graphheat", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("-g", "--graph", required=True, help="graph file")
        return sp

    sp = add("heat-content", "heat content at one time")
    sp.add_argument("-t", type=float, required=True)
    sp.add_argument("--method", choices=["path_sum", "spectral", "auto"], default="auto")

    sp = add("sweep", "heat content over a time grid, written as CSV")
    sp.add_argument("--t-min", type=float, required=True)
    sp.add_argument("--t-max", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--log", action="store_true", help="logarithmic grid")
    sp.add_argument("--method", choices=["path_sum", "spectral", "auto"], default="auto")
    sp.add_argument("-o", "--output", required=True)

    sp = add("kernel", "heat kernel p_t(x, y)")
    sp.add_argument("--x", type=_point, required=True)
    sp.add_argument("--y", type=_point, required=True)
    sp.add_argument("-t", type=float, required=True)

    sp = add("flux", "heat flux out of a region")
    sp.add_argument("--region", required=True, help="comma-separated edge:a:b intervals")
    sp.add_argument("-t", type=float, required=True)

    sp = add("derivative", "derivative of Q_t under lengthening an edge")
    sp.add_argument("--edge", type=int, required=True)
    sp.add_argument("-t", type=float, required=True)

    sp = add("surgery", "transform a graph and write the result")
    sp.add_argument("--op", required=True, choices=["loop-cut", "mirror", "attach", "add-dirichlet", "lengthen", "scale", "subdivide"])
    sp.add_argument("--edge", type=int)
    sp.add_argument("--vertex", type=int)
    sp.add_argument("--vertices", type=_int_list, help="comma-separated reflection vertices")
    sp.add_argument("-m", type=int, default=2, help="mirror multiplicity")
    sp.add_argument("--pendant", help="pendant graph file (attach)")
    sp.add_argument("--root", type=int, default=0, help="pendant root vertex (attach)")
    sp.add_argument("-s", "--amount", type=float, help="length increment or scale factor")
    sp.add_argument("--offset", type=float, help="subdivision offset")
    sp.add_argument("-o", "--output", required=True)

    sp = add("verify", "run invariant suites")
    sp.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")

    sp = add("oracle-compare", "path sum against the finite-difference oracle")
    sp.add_argument("-t", type=float, required=True)
    sp.add_argument("--mesh", type=float, required=True)
    return p


def _parse(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            conf = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidGraph(f"config {args.config}: {exc}") from None
        if not isinstance(conf, dict):
            raise InvalidGraph(f"config {args.config}: expected an object")
        # re-parse with config values as defaults so explicit flags win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in conf.items()})
        args = parser.parse_args(argv)
    return args


def _print(key: str, value) -> None:
    print(f"{key} {value!r}" if isinstance(value, float) else f"{key} {value}")


def _cmd_heat_content(args) -> int:
    g = load_graph(args.graph)
    hv = heat_content(g, args.t, _cfg(args))
    _print("value", float(hv.value))
    _print("error_bound", float(hv.error_bound))
    _print("method", hv.method)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    g = load_graph(args.graph)
    if args.steps < 1 or not (0 < args.t_min <= args.t_max):
        raise ValueError("need 0 < t-min <= t-max and steps >= 1")
    n = args.steps
    if n == 1:
        ts = np.array([args.t_min])
    elif args.log:
        ts = np.geomspace(args.t_min, args.t_max, n)
    else:
        ts = np.linspace(args.t_min, args.t_max, n)
    cfg = _cfg(args)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value", "error_bound", "method"])
        for t in ts:
            hv = heat_content(g, float(t), cfg)
            w.writerow([repr(float(t)), repr(float(hv.value)), repr(float(hv.error_bound)), hv.method])
    return EXIT_OK


def _cmd_kernel(args) -> int:
    g = load_graph(args.graph, require_dirichlet=False)
    hv = heat_kernel(g, args.x, args.y, args.t, _cfg(args))
    _print("value", float(hv.value))
    _print("error_bound", float(hv.error_bound))
    return EXIT_OK


def _cmd_flux(args) -> int:
    g = load_graph(args.graph, require_dirichlet=False)
    hv = boundary_flux(g, RegionSpec.parse(args.region), args.t, _cfg(args))
    _print("flux", float(hv.value))
    _print("error_bound", float(hv.error_bound))
    _print("scaled_flux", float(math.sqrt(math.pi / args.t) * hv.value))
    return EXIT_OK


def _cmd_derivative(args) -> int:
    g = load_graph(args.graph)
    hv = hadamard_derivative(g, args.edge, args.t, _cfg(args))
    _print("value", float(hv.value))
    _print("error_bound", float(hv.error_bound))
    return EXIT_OK


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise ValueError(f"--op {args.op} requires --{n}")


def _cmd_surgery(args) -> int:
    g = load_graph(args.graph)
    op = args.op
    if op == "loop-cut":
        _need(args, "edge")
        out = midpoint_loop_cut(g, args.edge)
    elif op == "mirror":
        _need(args, "vertices")
        out = mirror(g, args.vertices, args.m)
    elif op == "attach":
        _need(args, "vertex", "pendant")
        out = attach_pendant(g, args.vertex, load_graph(args.pendant, require_dirichlet=False), args.root)
    elif op == "add-dirichlet":
        _need(args, "vertex")
        out = add_dirichlet(g, args.vertex)
    elif op == "lengthen":
        _need(args, "edge", "amount")
        out = lengthen_edge(g, args.edge, args.amount)
    elif op == "scale":
        _need(args, "amount")
        out = scale(g, args.amount)
    else:
        _need(args, "edge", "offset")
        out = subdivide(g, args.edge, args.offset)
    if isinstance(out, list):
        base = Path(args.output)
        for i, part in enumerate(out):
            path = base.with_name(f"{base.stem}.part{i}{base.suffix}")
            save_graph(part, path)
            print(f"wrote {path}")
    else:
        save_graph(out, args.output)
        print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    g = load_graph(args.graph)
    suites = SUITES if args.suite == "all" else (args.suite,)
    cfg = EvalConfig(tolerance=min(args.tol, 1e-11), max_terms=int(args.max_terms), method="path_sum", threads=_threads(args))
    checks = run_suites(g, suites, cfg)
    for c in checks:
        print(c.line())
    failed = sum(c.passed is False for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks without failure")
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_oracle_compare(args) -> int:
    g = load_graph(args.graph)
    cfg = EvalConfig(tolerance=args.tol, max_terms=int(args.max_terms), method="path_sum", threads=_threads(args))
    hv = heat_content(g, args.t, cfg)
    q = spectral.eigen_heat_content(spectral.build(g, args.mesh), args.t)
    _print("path_sum", float(hv.value))
    _print("error_bound", float(hv.error_bound))
    _print("spectral", float(q))
    _print("gap", float(hv.value - q))
    return EXIT_OK


COMMANDS = {
    "heat-content": _cmd_heat_content,
    "sweep": _cmd_sweep,
    "kernel": _cmd_kernel,
    "flux": _cmd_flux,
    "derivative": _cmd_derivative,
    "surgery": _cmd_surgery,
    "verify": _cmd_verify,
    "oracle-compare": _cmd_oracle_compare,
}


def run(argv=None) -> int:
    try:
        args = _parse(argv)
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidGraph, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
