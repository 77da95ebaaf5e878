"""Command-line front end.

Subcommands: ``solve`` (one polygon, CSV trajectory + JSON summary),
``converge`` (mesh-refinement study, JSON report), ``check`` (condition
checks, JSON report) and ``list-examples``.

Exit codes: 0 success / pass, 1 usage or map errors, 2 infeasible
selection (certificate printed), 3 a check found a counterexample.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from typing import Sequence

from . import analyzer, mapdsl, solver
from .selector import SelectionPolicy, WcmInfeasible
from .setmap import BUILTIN_NAMES, MapDefinitionError, SetValuedMap, builtin


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # values like "-1,-0.5" must parse as vector arguments, not options
        self._negative_number_matcher = re.compile(r"^-[\d.]")

    def error(self, message: str):  # exit 1 instead of argparse's default 2
        raise UsageError(message)


_EXAMPLES = [
    {
        "name": "example1",
        "dim": "1",
        "params": {},
        "about": "interval velocities: [-1,0] left of 0, [-1,1] from 0 on",
    },
    {
        "name": "example2_F",
        "dim": "1",
        "params": {},
        "about": "two-point image {t, cbrt(t)}; continuous, non-convex",
    },
    {
        "name": "example2_G",
        "dim": "1",
        "params": {},
        "about": "two-point image {cbrt(t), t+sign(t)}; jumps at 0",
    },
    {
        "name": "example3",
        "dim": "2",
        "params": {},
        "about": "cube-root interval times the constant union [-2,-1] u [1,2]",
    },
    {
        "name": "example4",
        "dim": "n",
        "params": {"n": "state dimension (default 1)"},
        "about": "componentwise sign field united with its half-speed copy",
    },
    {
        "name": "antisign",
        "dim": "1",
        "params": {},
        "about": "velocity opposes displacement; selection fails after a crossing",
    },
    {
        "name": "normgrad",
        "dim": "n",
        "params": {"n": "state dimension (default 2)",
                   "k": "unit vectors at the origin (default 4)"},
        "about": "radial unit field x/|x|; violates the componentwise condition",
    },
]


def _parse_vector(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be comma-separated decimals, got {text!r}")


def resolve_map(source: str, dim: int | None = None, k: int | None = None) -> SetValuedMap:
    """A builtin name (``normgrad2`` style dimension suffixes allowed) or
    a map-file path."""
    if os.path.isfile(source) or source.endswith(".json"):
        return mapdsl.load_map(source)
    text = source.strip().lower().replace("_", "")
    simple = {
        "example1": "example1",
        "example2f": "example2_F",
        "example2g": "example2_G",
        "example3": "example3",
        "antisign": "antisign",
    }
    if text in simple:
        return builtin(simple[text])
    m = re.fullmatch(r"(example4|normgrad)(\d*)", text)
    if m:
        n = int(m.group(2)) if m.group(2) else dim
        if m.group(1) == "example4":
            return builtin("example4", {"n": n if n else 1})
        return builtin("normgrad", {"n": n if n else 2, "k": k if k else 4})
    raise UsageError(
        f"unknown map {source!r}; builtins: {', '.join(BUILTIN_NAMES)} "
        "(or a map-file path)"
    )


def _policy(args: argparse.Namespace) -> SelectionPolicy:
    return SelectionPolicy(args.policy.replace("-", "_"), args.slack)


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("DIFFINC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"DIFFINC_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _emit(payload: dict, args: argparse.Namespace) -> None:
    if not args.no_timestamp:
        payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    text = json.dumps(payload, indent=2)
    print(text)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")


def _add_map_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", required=True,
                   help="builtin name or map-file path")
    p.add_argument("--dim", type=int, default=None,
                   help="dimension parameter for example4/normgrad")
    p.add_argument("--k", type=int, default=None,
                   help="origin vector count for normgrad (default 4)")


def _add_solve_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x0", required=True, help="initial state, comma-separated")
    p.add_argument("--T", type=float, required=True, help="time horizon")
    p.add_argument("--policy", choices=["project", "lex-min", "lex-max"],
                   default="project")
    p.add_argument("--slack", type=float, default=0.0)
    p.add_argument("--v0", default=None,
                   help="initial velocity override, comma-separated")
    p.add_argument("--no-mesh-check", action="store_true",
                   help="run even when n violates h*M < 1")


def _add_output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default=None, help="write the report/trajectory here")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp field (byte-reproducible output)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: DIFFINC_THREADS or all cores)")


def build_parser() -> _Parser:
    parser = _Parser(prog="diffinc",
                     description="Euler polygons and condition checks for "
                                 "set-valued velocity fields with box-union images")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="build one Euler polygon")
    _add_map_options(p)
    _add_solve_options(p)
    p.add_argument("--N", type=int, default=None,
                   help="mesh steps (default: smallest n with h*M < 1)")
    p.add_argument("--format", choices=["csv", "json"], default="csv",
                   help="trajectory file format (default csv)")
    _add_output_options(p)

    p = sub.add_parser("converge", help="mesh-refinement study")
    _add_map_options(p)
    _add_solve_options(p)
    p.add_argument("--N0", type=int, required=True, help="coarsest mesh steps")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--samples-per-interval", type=int, default=4)
    _add_output_options(p)

    p = sub.add_parser("check", help="verify or refute a condition on a map")
    p.add_argument("condition", choices=["wcm", "monotone", "cyclic", "growth", "graph"])
    _add_map_options(p)
    p.add_argument("--radius", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=None,
                   help="sample budget (default 10000; growth 512, graph 128)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cycle-len", type=int, default=3)
    p.add_argument("--eps", type=float, default=1e-2,
                   help="closed-graph distance threshold")
    _add_output_options(p)

    p = sub.add_parser("list-examples", help="catalog of builtin maps")
    p.add_argument("--json", action="store_true", help="machine-readable output")

    return parser


def cmd_solve(args: argparse.Namespace) -> int:
    m = resolve_map(args.map, args.dim, args.k)
    x0 = _parse_vector(args.x0, "--x0")
    v0 = _parse_vector(args.v0, "--v0") if args.v0 else None
    policy = _policy(args)
    traj = solver.euler_polygon(
        m, x0, args.T, args.N, policy, v0,
        enforce_mesh=not args.no_mesh_check,
    )
    if args.output:
        if args.format == "json":
            doc = {
                "map": m.label,
                "policy": policy.variant,
                "times": list(traj.times),
                "nodes": [list(p) for p in traj.nodes],
                "velocities": [list(v) for v in traj.velocities],
            }
            text = json.dumps(doc, indent=2) + "\n"
        else:
            text = solver.trajectory_to_csv(traj)
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    node_res, interval_res = analyzer.residual(traj, m)
    summary = {
        "map": m.label,
        "policy": policy.variant,
        "slack": policy.slack,
        "horizon": traj.horizon,
        "steps": traj.steps,
        "mesh_size": traj.mesh_size,
        "x0": list(x0),
        "initial_velocity": list(traj.velocities[0]),
        "terminal": list(traj.terminal),
        "monotone": [r.classification for r in analyzer.check_trajectory_monotone(traj)],
        "node_residual": node_res,
        "interval_residual": interval_res,
        "output": args.output,
    }
    if not args.no_timestamp:
        summary["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    print(json.dumps(summary, indent=2))
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    m = resolve_map(args.map, args.dim, args.k)
    x0 = _parse_vector(args.x0, "--x0")
    v0 = _parse_vector(args.v0, "--v0") if args.v0 else None
    if args.levels < 2:
        raise UsageError("--levels must be at least 2")
    report = solver.converge(
        m, x0, args.T, args.N0, args.levels, _policy(args), v0,
        samples_per_interval=args.samples_per_interval,
        threads=_threads(args),
    )
    _emit(report.to_json_dict(), args)
    return 0


_CHECK_DEFAULT_SAMPLES = {"growth": 512, "graph": 128}


def cmd_check(args: argparse.Namespace) -> int:
    m = resolve_map(args.map, args.dim, args.k)
    samples = args.samples
    if samples is None:
        samples = _CHECK_DEFAULT_SAMPLES.get(args.condition, 10000)
    threads = _threads(args)
    if args.condition == "wcm":
        report = analyzer.check_wcm(m, args.radius, samples, args.seed, threads)
    elif args.condition == "monotone":
        report = analyzer.find_monotonicity_violation(
            m, args.radius, samples, args.seed, threads)
    elif args.condition == "cyclic":
        report = analyzer.find_cyclic_violation(
            m, args.radius, args.cycle_len, samples, args.seed, threads)
    elif args.condition == "graph":
        report = analyzer.check_closed_graph(
            m, args.radius, samples, args.seed, args.eps)
    else:
        fit = analyzer.estimate_growth(m, args.radius, samples, args.seed)
        failed = fit.declared_violation is not None and fit.declared_violation > 0
        report = analyzer.CheckReport(
            condition="growth",
            verdict="fail" if failed else "pass-sampled",
            samples=fit.samples,
            seed=args.seed,
            radius=args.radius,
            certificate=None,
            extra={
                "fit": {"a": fit.a, "b": fit.b},
                "declared": list(m.growth) if m.growth else None,
                "declared_violation": fit.declared_violation,
            },
        )
    payload = report.to_json_dict()
    payload["map"] = m.label
    _emit(payload, args)
    return 3 if report.failed else 0


def cmd_list_examples(args: argparse.Namespace) -> int:
    if args.json:
        print(json.dumps(_EXAMPLES, indent=2))
        return 0
    for row in _EXAMPLES:
        params = ", ".join(f"{k}: {v}" for k, v in row["params"].items()) or "-"
        print(f"{row['name']:<12} dim {row['dim']:<3} params: {params}")
        print(f"{'':<12} {row['about']}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "converge":
            return cmd_converge(args)
        if args.command == "check":
            return cmd_check(args)
        return cmd_list_examples(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (mapdsl.ParseError, MapDefinitionError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except WcmInfeasible as e:
        print(f"infeasible: {e}", file=sys.stderr)
        print(json.dumps({"infeasible": e.to_json_dict()}, indent=2))
        return 2


if __name__ == "__main__":
    sys.exit(main())
