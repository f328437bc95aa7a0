"""Command-line front end: generate instances, solve them, compare methods.

Methods are a closed set: ``da0`` (no expansion), ``grdy`` (greedy seats),
``lph`` (min-cost-flow heuristic), ``oracle`` (exhaustive optimum), and the
tree searches ``uct-iter``, ``uct-ipt-{r,p,e}``, ``uct-bt-{r,p,e}`` where
r/p/e pick the random/popularity/envy hospital ordering.

Every solve writes a run record (JSON, atomic) echoing the configuration,
the best cost and expansion, and, for searches, the path of a trajectory
CSV.  Records are byte-stable across reruns except for the wall time.

Exit codes: 0 success, 1 usage error, 2 instance validation error,
3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import glob
import hashlib
import io
import json
import os
import sys
import time

from . import baselines, da, datagen, uct
from .instance import (
    ExpansionVector,
    InstanceParseError,
    InstanceValidationError,
    MatchingInstance,
    load_instance,
    save_instance,
)

__all__ = ["main", "run_method", "make_record", "gap", "METHODS"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

SEED_ENV_VAR = "STABLE_EXPAND_SEED"

UCT_VARIANTS = {
    "uct-iter": ("iterative", "random"),
    "uct-ipt-r": ("ipt", "random"),
    "uct-ipt-p": ("ipt", "popularity"),
    "uct-ipt-e": ("ipt", "envy"),
    "uct-bt-r": ("bt", "random"),
    "uct-bt-p": ("bt", "popularity"),
    "uct-bt-e": ("bt", "envy"),
}
METHODS = ("da0", "grdy", "lph", "oracle") + tuple(UCT_VARIANTS)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class UsageError(Exception):
    pass


def _default_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else 0


def run_method(
    inst: MatchingInstance,
    method: str,
    *,
    rounds: int | None = None,
    exploration: float = uct.CP_DEFAULT,
    seed: int = 0,
    time_limit: float | None = None,
):
    """Dispatch one solve; returns (best_cost, best_extras, trajectory|None)."""
    if method == "agglin":
        raise UsageError("method not implemented; out of scope")
    if method == "da0":
        zero = ExpansionVector.zero(inst.total_hospitals)
        return da.expansion_cost(inst, zero.extras), zero.extras, None
    if method == "grdy":
        t, _, cost = baselines.greedy_expansion(inst)
        return cost, t.extras, None
    if method == "lph":
        t, _, cost = baselines.lp_heuristic(inst)
        return cost, t.extras, None
    if method == "oracle":
        t, cost = baselines.brute_force_optimal(inst)
        return cost, t.extras, None
    if method in UCT_VARIANTS:
        representation, ordering = UCT_VARIANTS[method]
        config = uct.SearchConfig(
            rounds=rounds if rounds is not None else max(1, inst.budget * 1000),
            exploration=exploration,
            representation=representation,
            ordering=ordering,
            seed=seed,
            time_limit=time_limit,
        )
        result = uct.search(inst, config)
        return result.best_cost, result.best_expansion.extras, result.trajectory
    raise UsageError(f"unknown method: {method!r}")


def make_record(
    *,
    instance_path: str,
    digest: str,
    method: str,
    rounds: int | None,
    exploration: float,
    seed: int,
    time_limit: float | None,
    best_cost: int,
    best_extras: tuple[int, ...],
    wall_time: float,
    trajectory_path: str | None,
) -> dict:
    return {
        "instance": instance_path,
        "instance_digest": digest,
        "method": method,
        "config": {
            "rounds": rounds,
            "exploration": exploration,
            "seed": seed,
            "time_limit": time_limit,
        },
        "best_cost": int(best_cost),
        "best_expansion": list(best_extras),
        "trajectory_path": trajectory_path,
        "wall_time_s": wall_time,
    }


def record_bytes(record: dict) -> bytes:
    return (json.dumps(record, indent=2, sort_keys=True) + "\n").encode("utf-8")


def _write_atomic(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as f:
        f.write(data)
    os.replace(tmp, path)


def gap(cost_method: float, cost_reference: float) -> float:
    """Percentage gap of a method against the reference, on the method's
    own cost scale (negative when the method beats the reference)."""
    return 100.0 * (cost_method - cost_reference) / cost_method


def _load_file(path: str) -> MatchingInstance:
    with open(path, "r", encoding="utf-8") as f:
        return load_instance(f.read())


def _is_run_record(path: str) -> bool:
    """Solve drops records next to instances, so instance globs catch them."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError):
        return False
    return isinstance(data, dict) and "method" in data and "instance_digest" in data


def _digest(path: str) -> str:
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def _cmd_gen(args) -> int:
    if args.set not in ("1", "2", "partial"):
        raise UsageError(f"unknown set: {args.set!r}")
    if not 0.0 <= args.alpha <= 1.0:
        raise UsageError("alpha out of range")
    if args.count < 0:
        raise UsageError("count must be non-negative")
    seed0 = _default_seed(args.seed)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    for i in range(args.count):
        seed = seed0 + i
        if args.set == "1":
            inst = datagen.generate_set1(
                args.residents, args.hospitals, args.budget, args.alpha, seed
            )
        elif args.set == "2":
            inst = datagen.generate_set2(
                args.residents, args.hospitals, args.budget, args.alpha, seed
            )
        else:
            per_hospital, extra = divmod(
                round(args.capacity_factor * args.residents), args.hospitals
            )
            capacities = [
                max(1, per_hospital + (1 if h < extra else 0))
                for h in range(args.hospitals)
            ]
            inst = datagen.generate_partial(
                args.residents,
                args.hospitals,
                min(args.applications, args.hospitals),
                capacities,
                args.budget,
                seed,
            )
        name = (
            f"{args.set}_D{args.residents}_H{args.hospitals}"
            f"_B{args.budget}_a{args.alpha}_s{seed}.json"
        )
        path = os.path.join(out_dir, name)
        _write_atomic(path, save_instance(inst).encode("utf-8"))
        print(path)
    return EXIT_OK


def _cmd_solve(args) -> int:
    if args.method not in METHODS and args.method != "agglin":
        raise UsageError(f"unknown method: {args.method!r}")
    inst = _load_file(args.instance)
    seed = _default_seed(args.seed)
    started = time.perf_counter()
    best_cost, best_extras, trajectory = run_method(
        inst,
        args.method,
        rounds=args.rounds,
        exploration=args.cp,
        seed=seed,
        time_limit=args.time_limit,
    )
    wall = time.perf_counter() - started

    base = args.out or f"{os.path.splitext(args.instance)[0]}.{args.method}"
    record_path = base if base.endswith(".json") else f"{base}.json"
    trajectory_path = None
    if trajectory is not None:
        trajectory_path = f"{os.path.splitext(record_path)[0]}.trajectory.csv"
        buf = io.StringIO()
        uct.write_trajectory_csv(trajectory, buf)
        _write_atomic(trajectory_path, buf.getvalue().encode("utf-8"))
    record = make_record(
        instance_path=args.instance,
        digest=_digest(args.instance),
        method=args.method,
        rounds=args.rounds,
        exploration=args.cp,
        seed=seed,
        time_limit=args.time_limit,
        best_cost=best_cost,
        best_extras=best_extras,
        wall_time=wall,
        trajectory_path=trajectory_path,
    )
    _write_atomic(record_path, record_bytes(record))
    print(best_cost)
    return EXIT_OK


def _cmd_compare(args) -> int:
    paths: list[str] = []
    for pattern in args.instances:
        hits = sorted(glob.glob(pattern))
        if not hits and os.path.exists(pattern):
            hits = [pattern]
        paths.extend(hits)
    records = [p for p in paths if _is_run_record(p)]
    for p in records:
        print(f"skipping run record: {p}", file=sys.stderr)
    paths = [p for p in paths if p not in records]
    if not paths:
        raise UsageError("no instance files matched")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods + [args.reference]:
        if m not in METHODS:
            raise UsageError(f"unknown method: {m!r}")
    seed0 = _default_seed(args.seed)

    rows = []
    sums = {m: 0.0 for m in methods}
    for i, path in enumerate(paths):
        inst = _load_file(path)
        seed = seed0 + i
        ref_cost, _, _ = run_method(
            inst, args.reference, rounds=args.rounds, exploration=args.cp, seed=seed
        )
        row: list[str] = [os.path.basename(path)]
        for m in methods:
            cost, _, _ = run_method(
                inst, m, rounds=args.rounds, exploration=args.cp, seed=seed
            )
            g = gap(cost, ref_cost)
            sums[m] += g
            row.append(f"{g:.4f}")
        rows.append(row)
    average = ["average"] + [f"{sums[m] / len(paths):.4f}" for m in methods]

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["instance"] + methods)
    writer.writerows(rows)
    writer.writerow(average)
    if args.out:
        _write_atomic(args.out, buf.getvalue().encode("utf-8"))
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="stable-expand", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate synthetic instance files")
    gen.add_argument("--set", default="1", help="1, 2, or partial")
    gen.add_argument("--residents", type=int, required=True)
    gen.add_argument("--hospitals", type=int, required=True)
    gen.add_argument("--budget", type=int, required=True)
    gen.add_argument("--alpha", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--out", default=None, help="output directory")
    gen.add_argument(
        "--applications", type=int, default=8, help="list length for --set partial"
    )
    gen.add_argument(
        "--capacity-factor",
        type=float,
        default=1.2,
        help="total admissions over residents for --set partial",
    )

    solve = sub.add_parser("solve", help="run one method on one instance file")
    solve.add_argument("instance")
    solve.add_argument("--method", required=True)
    solve.add_argument("--rounds", type=int, default=None)
    solve.add_argument("--cp", type=float, default=uct.CP_DEFAULT)
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--time-limit", type=float, default=None)
    solve.add_argument("--out", default=None, help="run-record path")

    compare = sub.add_parser("compare", help="gap table of methods vs a reference")
    compare.add_argument("instances", nargs="+", help="instance files or globs")
    compare.add_argument("--methods", required=True, help="comma-separated methods")
    compare.add_argument("--reference", default="oracle")
    compare.add_argument("--rounds", type=int, default=None)
    compare.add_argument("--cp", type=float, default=uct.CP_DEFAULT)
    compare.add_argument("--seed", type=int, default=None)
    compare.add_argument("--out", default=None, help="CSV path (default stdout)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_compare(args)
    except SystemExit as e:
        return int(e.code or 0)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceParseError, InstanceValidationError) as e:
        print(f"invalid instance: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, ValueError, baselines.InfeasibleFlowError) as e:
        print(f"runtime failure: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
