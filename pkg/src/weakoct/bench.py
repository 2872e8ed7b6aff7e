"""Benchmark harness: sparsity and scaling of pack-structured workloads.

A workload builds k independent packs of p variables each: interval bounds
on every variable, a few relational constraints inside each pack, a
comparison and a join against a perturbed copy, and a forget/re-bound pair.
Packs never share variables, so a sparsity-preserving implementation should
pay per pack, while the classic dense strongly closed implementation pays in
the total variable count for every operation.

Each run doubles as a differential correctness check: the strengthened final
state of every implementation must agree cell by cell.  Timings are wall
clock with warmup replays and a median over measured replays; results go to
CSV (impl,op,k,p,micros,nnz_before,nnz_after) for external plotting.

Implementation tags: ``sparse-weak`` and ``dense-strong``, plus ``-pure``
variants that force the pure-Python kernel backend so the compiled extension
can be compared against its fallback.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from statistics import median
from typing import Iterable, Sequence

from . import _kernels, dense, sparse
from .core import EMPTY, Mode, neg, pos
from .dense import DenseDbm
from .sparse import SparseDbm

Op = tuple  # ("assume", u, v, Fraction) | ("clone",) | ("join",) | ...

TIMED_OPS = {"assume", "join", "forget", "compare", "cassume", "cforget"}


@dataclass(frozen=True)
class Workload:
    n_packs: int
    pack_size: int
    seed: int
    script: tuple[Op, ...]

    @property
    def n_vars(self) -> int:
        return self.n_packs * self.pack_size


@dataclass(frozen=True)
class Measurement:
    impl: str
    op: str
    k: int
    p: int
    micros: float
    nnz_before: int
    nnz_after: int


def gen_workload(k: int, p: int, seed: int) -> Workload:
    """Deterministic pack-structured op script (same seed, same script)."""
    if k < 1 or p < 1:
        raise ValueError("need k, p >= 1")
    rnd = random.Random(f"{seed}:{k}:{p}")
    script: list[Op] = []
    for pack in range(k):
        base = pack * p
        lo = {}
        hi = {}
        witness = {}
        for j in range(p):
            x = base + j
            lo[x] = rnd.randint(-8, 0)
            hi[x] = lo[x] + rnd.randint(0, 8)
            witness[x] = rnd.randint(lo[x], hi[x])
            script.append(("assume", pos(x), neg(x), Fraction(2 * hi[x])))
            script.append(("assume", neg(x), pos(x), Fraction(-2 * lo[x])))
        for _ in range(rnd.randint(1, p)):
            x, y = rnd.sample(range(base, base + p), 2) if p > 1 else (base, base)
            if x == y:
                continue
            u = rnd.choice((pos(x), neg(x)))
            v = rnd.choice((pos(y), neg(y)))
            value = {pos(x): witness[x], neg(x): -witness[x],
                     pos(y): witness[y], neg(y): -witness[y]}
            c = value[u] - value[v] + rnd.randint(0, 4)
            script.append(("assume", u, v, Fraction(c)))
        # perturbed copy: same pack re-boxed one unit higher, then compared
        # against and joined into the main state
        script.append(("clone",))
        for j in range(p):
            x = base + j
            script.append(("cforget", x))
        for j in range(p):
            x = base + j
            script.append(("cassume", pos(x), neg(x), Fraction(2 * (hi[x] + 1))))
            script.append(("cassume", neg(x), pos(x), Fraction(-2 * (lo[x] + 1))))
        script.append(("compare",))
        script.append(("join",))
        x = base + rnd.randrange(p)
        script.append(("forget", x))
        script.append(("assume", pos(x), neg(x), Fraction(2 * (hi[x] + 1))))
        script.append(("assume", neg(x), pos(x), Fraction(-2 * lo[x])))
    return Workload(k, p, seed, tuple(script))


class _SparseRunner:
    tag = "sparse-weak"

    def __init__(self, n_vars: int):
        self.state = SparseDbm.top(n_vars, Mode.RATIONAL)
        self.clone: SparseDbm | None = None

    def execute(self, op: Op) -> None:
        kind = op[0]
        if kind == "assume":
            result = sparse.assume_weak(op[1], op[2], op[3], self.state)
            assert result is not EMPTY
            self.state = result
        elif kind == "cassume":
            result = sparse.assume_weak(op[1], op[2], op[3], self.clone)
            assert result is not EMPTY
            self.clone = result
        elif kind == "forget":
            self.state = sparse.forget_weak(op[1], self.state)
        elif kind == "cforget":
            self.clone = sparse.forget_weak(op[1], self.clone)
        elif kind == "clone":
            self.clone = self.state
        elif kind == "compare":
            sparse.leq_weak(self.state, self.clone)
        elif kind == "join":
            self.state = sparse.join_weak(self.state, self.clone)
        else:
            raise ValueError(f"unknown op {kind!r}")

    def nnz(self, op: Op) -> int:
        target = self.clone if op[0].startswith("c") and self.clone else self.state
        return target.nnz

    def final_export(self) -> DenseDbm:
        return sparse.strengthen_export(self.state)


class _DenseRunner:
    tag = "dense-strong"

    def __init__(self, n_vars: int):
        self.state = dense.ArrayDbm.top(n_vars)
        self.clone: dense.ArrayDbm | None = None

    def execute(self, op: Op) -> None:
        kind = op[0]
        if kind == "assume":
            assert self.state.assume_oct(op[1], op[2], op[3])
        elif kind == "cassume":
            assert self.clone.assume_oct(op[1], op[2], op[3])
        elif kind == "forget":
            self.state.forget_oct(op[1])
        elif kind == "cforget":
            self.clone.forget_oct(op[1])
        elif kind == "clone":
            self.clone = self.state.copy()
        elif kind == "compare":
            self.state.leq(self.clone)
        elif kind == "join":
            self.state.join(self.clone)
        else:
            raise ValueError(f"unknown op {kind!r}")

    def nnz(self, op: Op) -> int:
        target = self.clone if op[0].startswith("c") and self.clone else self.state
        return target.nnz_off_diagonal()

    def final_export(self) -> DenseDbm:
        return self.state.to_dense()


IMPLS = {
    "sparse": (_SparseRunner, None),
    "dense": (_DenseRunner, None),
    "sparse-pure": (_SparseRunner, "pure"),
    "dense-pure": (_DenseRunner, "pure"),
}


def _replay(runner, script: Sequence[Op], record: bool):
    """One pass over the script; returns (durations, nnz pairs) for timed ops."""
    durations: list[float] = []
    nnz_pairs: list[tuple[int, int]] = []
    for op in script:
        if op[0] not in TIMED_OPS:
            runner.execute(op)
            continue
        if record:
            before = runner.nnz(op)
            start = time.perf_counter_ns()
            runner.execute(op)
            stop = time.perf_counter_ns()
            durations.append((stop - start) / 1000.0)
            nnz_pairs.append((before, runner.nnz(op)))
        else:
            runner.execute(op)
    return durations, nnz_pairs


def run(
    workload: Workload,
    impls: Iterable[str] = ("sparse", "dense"),
    reps: int = 5,
    warmup: int = 1,
) -> list[Measurement]:
    """Replay the workload per implementation; median-of-``reps`` timings.

    Raises if the strengthened final states of the implementations disagree
    (every benchmark run is also a differential correctness run).
    """
    impls = list(impls)
    measurements: list[Measurement] = []
    finals: dict[str, DenseDbm] = {}
    op_names = [
        op[0][1:] if op[0] in ("cassume", "cforget") else op[0]
        for op in workload.script
        if op[0] in TIMED_OPS
    ]
    for impl in impls:
        if impl not in IMPLS:
            raise ValueError(f"unknown implementation {impl!r}")
        runner_cls, backend = IMPLS[impl]
        tag = runner_cls.tag + ("-pure" if backend else "")
        previous = _kernels.select(backend) if backend else None
        try:
            for _ in range(warmup):
                _replay(runner_cls(workload.n_vars), workload.script, record=False)
            per_rep: list[list[float]] = []
            nnz_pairs: list[tuple[int, int]] = []
            for _ in range(max(1, reps)):
                runner = runner_cls(workload.n_vars)
                durations, nnz_pairs = _replay(runner, workload.script, record=True)
                per_rep.append(durations)
                finals[impl] = runner.final_export()
        finally:
            if previous:
                _kernels.select(previous)
        for i, name in enumerate(op_names):
            micros = median(rep[i] for rep in per_rep)
            before, after = nnz_pairs[i]
            measurements.append(
                Measurement(
                    tag, name, workload.n_packs, workload.pack_size,
                    micros, before, after,
                )
            )
    reference = None
    for impl, final in finals.items():
        if reference is None:
            reference = (impl, final)
        elif final != reference[1]:
            raise RuntimeError(
                f"differential mismatch between {reference[0]} and {impl}"
            )
    return measurements


def total_micros(measurements: Iterable[Measurement], tag: str) -> float:
    return sum(m.micros for m in measurements if m.impl == tag)


CSV_HEADER = "impl,op,k,p,micros,nnz_before,nnz_after"


def emit_csv(measurements: Iterable[Measurement], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for m in measurements:
            fh.write(
                f"{m.impl},{m.op},{m.k},{m.p},{m.micros:.3f},"
                f"{m.nnz_before},{m.nnz_after}\n"
            )
