"""Command-line front end: oracle, sparse, analyze, bench subcommands.

The ``oracle`` and ``sparse`` subcommands share the constraint file format
and the ``u v bound`` triple output (signed variables as +name/-name), so
their outputs diff textually; both exit 0 for a satisfiable result and 1
for EMPTY.  ``analyze`` exits 0 when every assert is proven, 2 otherwise,
1 on parse errors.
"""

from __future__ import annotations

import argparse
import sys

from . import bench as bench_mod
from . import dense, sparse
from .analyzer import analyze, report
from .constraints import parse_constraints
from .core import EMPTY, Mode, ParseError, format_bound, svar_text
from .domain import WidenConfig


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _print_triples(items, names) -> None:
    for u, v, b in sorted(items):
        print(f"{svar_text(u, names)} {svar_text(v, names)} {format_bound(b)}")


def _dense_triples(m: dense.DenseDbm):
    return [(u, v, b) for u, v, b in m.finite_items() if u != v]


def cmd_oracle(args) -> int:
    try:
        cs, names = parse_constraints(_read(args.file))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    matrix = dense.DenseDbm.from_cells(len(names), {(u, v): b for u, v, b in cs})
    if args.close:
        result = dense.close(matrix)
    elif args.tight_close:
        result = dense.tight_close(dense.make_coherent(matrix))
    else:
        result = dense.strong_close(matrix)
    if result is EMPTY:
        print("EMPTY")
        return 1
    _print_triples(_dense_triples(result), names)
    return 0


def cmd_sparse(args) -> int:
    try:
        cs, names = parse_constraints(_read(args.file))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    mode = Mode.INTEGER if args.int_mode else Mode.RATIONAL
    result = sparse.from_constraints(cs, len(names), mode)
    if result is EMPTY:
        print("EMPTY")
        return 1
    if args.nnz:
        print(result.nnz)
    elif args.strengthen:
        _print_triples(_dense_triples(sparse.strengthen_export(result)), names)
    else:
        _print_triples(result.items(), names)
    return 0


def cmd_analyze(args) -> int:
    try:
        text = _read(args.file)
        cfg = WidenConfig(delay=args.widen_delay, max_iterations=args.max_iter)
        mode = Mode.INTEGER if args.int_mode else Mode.RATIONAL
        result = analyze(text, cfg, mode)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report(result, show_cells=args.cells, fmt=args.format))
    return 0 if result.all_proven else 2


def cmd_bench(args) -> int:
    workload = bench_mod.gen_workload(args.packs, args.pack_size, args.seed)
    impls = [name.strip() for name in args.impls.split(",") if name.strip()]
    try:
        measurements = bench_mod.run(
            workload, impls, reps=args.reps, warmup=args.warmup
        )
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    bench_mod.emit_csv(measurements, args.out)
    tags = sorted({m.impl for m in measurements})
    for tag in tags:
        total = bench_mod.total_micros(measurements, tag)
        print(f"{tag}: {total:.0f} us total")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakoct",
        description="Sparse octagon library: dense oracle, sparse ops, "
        "analyzer, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    oracle = sub.add_parser("oracle", help="dense reference closures")
    oracle.add_argument("file", help="constraint file ('-' for stdin)")
    group = oracle.add_mutually_exclusive_group(required=True)
    group.add_argument("--close", action="store_true", help="shortest-path closure")
    group.add_argument("--strong-close", action="store_true", help="strong closure")
    group.add_argument(
        "--tight-close", action="store_true", help="integer tight closure"
    )
    oracle.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("sparse", help="weakly closed sparse operations")
    sp.add_argument("file", help="constraint file ('-' for stdin)")
    group = sp.add_mutually_exclusive_group()
    group.add_argument(
        "--weak-close", action="store_true", help="print weakly closed cells (default)"
    )
    group.add_argument(
        "--strengthen", action="store_true", help="print the strengthened matrix"
    )
    group.add_argument("--nnz", action="store_true", help="print stored cell count")
    sp.add_argument("--int", dest="int_mode", action="store_true", help="integer mode")
    sp.set_defaults(func=cmd_sparse)

    an = sub.add_parser("analyze", help="abstract-interpret a mini-language program")
    an.add_argument("file", help="program file ('-' for stdin)")
    an.add_argument("--int", dest="int_mode", action="store_true", help="integer mode")
    an.add_argument("--cells", action="store_true", help="print full cell lists")
    an.add_argument("--format", choices=("text", "tsv"), default="text")
    an.add_argument("--widen-delay", type=int, default=1, metavar="N")
    an.add_argument("--max-iter", type=int, default=64, metavar="N")
    an.set_defaults(func=cmd_analyze)

    be = sub.add_parser("bench", help="pack-scaling benchmark, CSV output")
    be.add_argument("--packs", type=int, required=True, metavar="K")
    be.add_argument("--pack-size", type=int, required=True, metavar="P")
    be.add_argument("--seed", type=int, default=0, metavar="S")
    be.add_argument("--out", required=True, help="CSV output path")
    be.add_argument(
        "--impls",
        default="sparse,dense",
        help="comma list from: sparse, dense, sparse-pure, dense-pure",
    )
    be.add_argument("--reps", type=int, default=5)
    be.add_argument("--warmup", type=int, default=1)
    be.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
