"""Command-line interface.

Exit codes: 0 when the property holds or the command succeeded, 1 when it fails
or nothing was found (evidence is printed), 2 for malformed input or usage.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import (FAMILIES, FamilyParams, ParameterError, PartitionError, StructureError, dumps_partition,
                   dumps_structure, generate, load_partition, load_structure, validate)
from .decomp import SearchTooLarge, find_decomposition, is_congruence, ma_degree
from .experiments import (BOUNDEDNESS_COLUMNS, LOWER_BOUND_COLUMNS, SWEEP_COLUMNS, boundedness,
                          decomposition_sweep, lower_bound, to_csv)
from .qftypes import DEFAULT_BUDGET, CensusTooLarge, DeltaSpec, census, qf_type


class UsageError(Exception):
    pass


def _ids(text: str | None) -> list[int]:
    if text is None or not text.strip():
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated element ids, got {text!r}") from None


def _ints(text: str) -> list[int]:
    vals = _ids(text)
    if not vals:
        raise UsageError("expected a non-empty comma-separated list of integers")
    return vals


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _delta(args) -> DeltaSpec:
    return DeltaSpec.parse(args.delta)


def cmd_validate(args) -> int:
    s = load_structure(args.structure, check=False)
    problems = validate(s)
    for v in problems:
        print(f"{v.kind}: {v}")
    if not problems:
        print("ok")
    return 1 if problems else 0


def cmd_type(args) -> int:
    s = load_structure(args.structure)
    print(qf_type(s, _ids(args.tuple), _ids(args.base), _delta(args)).canonical())
    return 0


def cmd_census(args) -> int:
    s = load_structure(args.structure)
    report = census(s, _ids(args.base), args.max_len, _delta(args), args.budget)
    _emit(report.to_csv(), args.out)
    return 0


def cmd_check(args) -> int:
    s = load_structure(args.structure)
    part = load_partition(args.partition, s)
    verdict = is_congruence(s, part, args.max_len, _delta(args), args.budget)
    sys.stdout.write(verdict.format())
    return 0 if verdict.holds else 1


def cmd_find(args) -> int:
    s = load_structure(args.structure)
    found = find_decomposition(s, args.k, args.max_len, args.method, _delta(args), args.empty_base,
                               args.exhaustive_limit, args.budget)
    if found is None:
        print(f"absent: no decomposition with k={args.k} found by method {args.method}")
        return 1
    if args.out:
        Path(args.out).write_text(dumps_partition(found.partition), encoding="utf-8")
    else:
        sys.stdout.write(dumps_partition(found.partition))
    sys.stdout.write(found.verdict.format())
    return 0


def cmd_gen(args) -> int:
    s = generate(FamilyParams(args.family, m=args.m, s=args.s, u=args.u, n=args.n))
    _emit(dumps_structure(s), args.out)
    return 0


def cmd_degree(args) -> int:
    s = load_structure(args.structure)
    for rel, d in ma_degree(s).items():
        print(f"{rel}: {d}")
    return 0


def cmd_experiment(args) -> int:
    if args.experiment == "boundedness":
        text = to_csv(boundedness(_ints(args.m), args.max_len, args.budget), BOUNDEDNESS_COLUMNS)
    elif args.experiment == "lower-bound":
        text = to_csv(lower_bound(_ints(args.m), args.s or 3, args.max_len, args.budget), LOWER_BOUND_COLUMNS)
    else:
        if not args.family:
            raise UsageError("decomposition-sweep needs --family")
        extra = {"s": args.s} if args.family == "equivalence" else None
        ks = _ints(args.k) if args.k else None
        rows = decomposition_sweep(args.family, _ints(args.sizes), ks, args.method, args.max_len, extra,
                                   args.budget)
        text = to_csv(rows, SWEEP_COLUMNS)
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--delta", help="comma-separated relation names that contribute atoms (default: all)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="tuple-evaluation cap")

    parser = argparse.ArgumentParser(prog="qfdecomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="report invariant violations in a structure file")
    p.add_argument("structure")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("type", parents=[common], help="print the canonical type of a tuple")
    p.add_argument("structure")
    p.add_argument("--tuple", default="")
    p.add_argument("--base", default="")
    p.set_defaults(func=cmd_type)

    p = sub.add_parser("census", parents=[common], help="count realized types over a base (CSV)")
    p.add_argument("structure")
    p.add_argument("--base", default="")
    p.add_argument("--max-len", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("check", parents=[common], help="check whether a partition is a congruence")
    p.add_argument("structure")
    p.add_argument("partition")
    p.add_argument("--max-len", type=int, default=3)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("find", parents=[common], help="search for a decomposition")
    p.add_argument("structure")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--method", choices=["components", "exhaustive"], default="components")
    p.add_argument("--empty-base", action="store_true")
    p.add_argument("--exhaustive-limit", type=int, default=10)
    p.add_argument("--out", help="write the partition file here instead of stdout")
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("gen", parents=[common], help="generate a structure from a named family")
    p.add_argument("family", choices=FAMILIES)
    for name in ("m", "s", "u", "n"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("degree", parents=[common], help="per-relation degree diagnostic")
    p.add_argument("structure")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("experiment", parents=[common], help="run a sweep and emit CSV")
    p.add_argument("experiment", choices=["boundedness", "lower-bound", "decomposition-sweep"])
    p.add_argument("--m", default="4,8,16", help="pair/class counts for boundedness and lower-bound")
    p.add_argument("--s", type=int, help="class size (lower-bound, equivalence sweeps)")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--sizes", default="4,9,16", help="size parameters for decomposition-sweep")
    p.add_argument("--k", help="comma-separated k values (default ceil(sqrt(size))+1)")
    p.add_argument("--method", choices=["components", "exhaustive"], default="components")
    p.add_argument("--max-len", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CensusTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StructureError, PartitionError, ParameterError, SearchTooLarge, UsageError,
            ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
