"""Dense reference implementation of the classic DBM operations.

This module is the ground-truth oracle: every operation of the sparse module
has a dense counterpart here whose results the test suite compares cell by
cell.  A difference bound matrix over 2n signed variables stores in cell
(u, v) an upper bound on u - v; INF means "no constraint".  Two
concretizations matter:

* the *potential* one (arbitrary assignments of the 2n signed variables),
  canonicalized by shortest-path closure;
* the *octagonal* one (regular assignments, where the negative occurrence is
  forced to the opposite value), canonicalized by strong closure = coherence
  + closure + strengthening.

Everything here is straightforwardly quadratic or cubic and makes no attempt
at sparsity; the cubic/quadratic cell loops are delegated to the kernel
backend (compiled if available).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from . import _kernels
from .core import (
    EMPTY,
    INF,
    ZERO,
    Bound,
    IntegerModeError,
    bar,
    bound_add,
    bound_half,
    eval_signed,
    is_integral,
    neg,
    pos,
)

Env = Mapping[int, Fraction]


class DenseDbm:
    """Full 2n x 2n matrix of bounds, row-major.

    Treated as immutable by all public operations (each returns a fresh
    matrix); the mutating helpers are package-internal.
    """

    __slots__ = ("n_vars", "dim", "cells")

    def __init__(self, n_vars: int, cells: list[Bound] | None = None):
        self.n_vars = n_vars
        self.dim = 2 * n_vars
        if cells is None:
            cells = [INF] * (self.dim * self.dim)
        elif len(cells) != self.dim * self.dim:
            raise ValueError("cell vector has wrong length")
        self.cells = cells

    @classmethod
    def top(cls, n_vars: int) -> DenseDbm:
        """All-INF matrix with a null diagonal."""
        m = cls(n_vars)
        for v in range(m.dim):
            m.cells[v * m.dim + v] = ZERO
        return m

    @classmethod
    def from_cells(
        cls, n_vars: int, entries: Mapping[tuple[int, int], Bound] | Iterable, *,
        zero_diagonal: bool = False,
    ) -> DenseDbm:
        if isinstance(entries, Mapping):
            entries = entries.items()
        m = cls.top(n_vars) if zero_diagonal else cls(n_vars)
        for (u, v), b in entries:
            i = u * m.dim + v
            if b < m.cells[i]:
                m.cells[i] = b
        return m

    def get(self, u: int, v: int) -> Bound:
        return self.cells[u * self.dim + v]

    def set(self, u: int, v: int, b: Bound) -> None:
        self.cells[u * self.dim + v] = b

    def copy(self) -> DenseDbm:
        return DenseDbm(self.n_vars, list(self.cells))

    def finite_items(self) -> Iterator[tuple[int, int, Bound]]:
        """All finite cells, diagonal included, in row-major order."""
        dim = self.dim
        for u in range(dim):
            row = u * dim
            for v in range(dim):
                b = self.cells[row + v]
                if b != INF:
                    yield u, v, b

    def finite_off_diagonal_count(self) -> int:
        return sum(1 for u, v, _ in self.finite_items() if u != v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseDbm):
            return NotImplemented
        return self.n_vars == other.n_vars and self.cells == other.cells

    def __repr__(self) -> str:
        entries = ", ".join(
            f"({u},{v})={b}" for u, v, b in self.finite_items() if u != v
        )
        return f"DenseDbm(n={self.n_vars}, {{{entries}}})"

    # kernel boundary: (num, den) pairs with den == 0 encoding INF
    def _to_arrays(self) -> tuple[list[int], list[int]]:
        nums: list[int] = []
        dens: list[int] = []
        for b in self.cells:
            if b == INF:
                nums.append(1)
                dens.append(0)
            else:
                nums.append(b.numerator)
                dens.append(b.denominator)
        return nums, dens

    @classmethod
    def _from_arrays(cls, n_vars: int, nums: list[int], dens: list[int]) -> DenseDbm:
        cells: list[Bound] = [
            INF if d == 0 else Fraction(n, d) for n, d in zip(nums, dens)
        ]
        return cls(n_vars, cells)


OrEmpty = Union[DenseDbm, type(EMPTY)]


# -- membership and abstraction ------------------------------------------------


def member(rho: Env, m: DenseDbm) -> bool:
    """Does the regular environment satisfy every cell constraint?"""
    vals = [eval_signed(rho, u) for u in range(m.dim)]
    for u, v, b in m.finite_items():
        if vals[u] - vals[v] > b:
            return False
    return True


@dataclass(frozen=True)
class PointSet:
    """A finite set of regular environments over a common variable set."""

    n_vars: int
    points: tuple[Env, ...]

    def __iter__(self) -> Iterator[Env]:
        return iter(self.points)


def alpha_points(s: PointSet) -> DenseDbm:
    """Minimal DBM containing every point of a non-empty set."""
    if not s.points:
        raise ValueError("empty point set has no abstraction")
    m = DenseDbm(s.n_vars)
    dim = m.dim
    for rho in s.points:
        vals = [eval_signed(rho, u) for u in range(dim)]
        for u in range(dim):
            row = u * dim
            vu = vals[u]
            for v in range(dim):
                d = vu - vals[v]
                cur = m.cells[row + v]
                if cur == INF or d > cur:
                    m.cells[row + v] = d
    return m


def concrete_assume(u: int, v: int, c: Bound, s: PointSet) -> PointSet:
    kept = tuple(
        rho for rho in s.points if eval_signed(rho, u) - eval_signed(rho, v) <= c
    )
    return PointSet(s.n_vars, kept)


def concrete_forget(x: int, s: PointSet, samples: Iterable[Fraction]) -> PointSet:
    samples = list(samples)
    out = []
    for rho in s.points:
        for r in samples:
            new = dict(rho)
            new[x] = r
            out.append(new)
    return PointSet(s.n_vars, tuple(out))


# -- canonical forms -----------------------------------------------------------


def close(m: DenseDbm) -> OrEmpty:
    """Shortest-path closure, or EMPTY when a negative cycle exists."""
    nums, dens = m._to_arrays()
    if not _kernels.close_cells(nums, dens, m.dim):
        return EMPTY
    return DenseDbm._from_arrays(m.n_vars, nums, dens)


def make_coherent(m: DenseDbm) -> DenseDbm:
    """Fold each cell with its mirror (v̄, ū); concretization is unchanged."""
    out = m.copy()
    dim = m.dim
    for u in range(dim):
        for v in range(dim):
            mirror = m.cells[bar(v) * dim + bar(u)]
            if mirror < out.cells[u * dim + v]:
                out.cells[u * dim + v] = mirror
    return out


def strengthen(m: DenseDbm) -> DenseDbm:
    """Lower each cell to at most the half-sum of its two unary cells."""
    nums, dens = m._to_arrays()
    _kernels.strengthen_cells(nums, dens, m.dim)
    return DenseDbm._from_arrays(m.n_vars, nums, dens)


def _unary_sums_ok(m: DenseDbm) -> bool:
    # a closed coherent matrix always passes; kept as an explicit guard for
    # callers feeding matrices from other pipelines (e.g. after tightening)
    for u in range(m.dim):
        if bound_add(m.get(u, bar(u)), m.get(bar(u), u)) < 0:
            return False
    return True


def strong_close(m: DenseDbm) -> OrEmpty:
    """Coherence, closure, octagonal-emptiness check, strengthening."""
    closed = close(make_coherent(m))
    if closed is EMPTY:
        return EMPTY
    if not _unary_sums_ok(closed):
        return EMPTY
    return strengthen(closed)


def tighten(m: DenseDbm) -> DenseDbm:
    """Round odd unary cells down by one (integer environments only)."""
    for _, _, b in m.finite_items():
        if not is_integral(b):
            raise IntegerModeError(f"non-integral bound {b} in integer mode")
    out = m.copy()
    for u in range(m.dim):
        b = m.get(u, bar(u))
        if b != INF and b.numerator % 2:
            out.set(u, bar(u), b - 1)
    return out


def tight_close(m: DenseDbm) -> OrEmpty:
    """Canonical form for integer environments: close, tighten, strengthen."""
    closed = close(m)
    if closed is EMPTY:
        return EMPTY
    tightened = tighten(closed)
    if not _unary_sums_ok(tightened):
        return EMPTY
    return strengthen(tightened)


# -- predicates ----------------------------------------------------------------


def is_closed(m: DenseDbm) -> bool:
    dim = m.dim
    cells = m.cells
    for v in range(dim):
        if cells[v * dim + v] != 0:
            return False
    for u in range(dim):
        for k in range(dim):
            b1 = cells[u * dim + k]
            if b1 == INF:
                continue
            for w in range(dim):
                b2 = cells[k * dim + w]
                if b2 == INF:
                    continue
                if cells[u * dim + w] > b1 + b2:
                    return False
    return True


def is_coherent(m: DenseDbm) -> bool:
    dim = m.dim
    for u in range(dim):
        for v in range(dim):
            if m.cells[u * dim + v] != m.cells[bar(v) * dim + bar(u)]:
                return False
    return True


def is_strongly_closed(m: DenseDbm) -> bool:
    if not is_closed(m) or not is_coherent(m):
        return False
    for u in range(m.dim):
        half_u = m.get(u, bar(u))
        for v in range(m.dim):
            cand = bound_half(bound_add(half_u, m.get(bar(v), v)))
            if m.get(u, v) > cand:
                return False
    return True


def is_weakly_closed(m: DenseDbm) -> bool:
    """Null diagonal, and strengthening the matrix would make it strongly closed."""
    for v in range(m.dim):
        if m.get(v, v) != 0:
            return False
    return is_strongly_closed(strengthen(m))


def is_tightly_closed(m: DenseDbm) -> bool:
    if not is_strongly_closed(m):
        return False
    for u, v, b in m.finite_items():
        if not is_integral(b):
            return False
        if v == bar(u) and b.numerator % 2:
            return False
    return True


def weak_closedness_forms_agree(m: DenseDbm) -> bool:
    """Cross-check of the two equivalent statements of weak closedness.

    Form (i) is :func:`is_weakly_closed`; form (ii) asks for a null diagonal,
    a coherent strengthening, and the strengthened triangular inequality
    S(B)_uw <= B_uv + B_vw.  The two must evaluate identically on every
    matrix.
    """
    form_i = is_weakly_closed(m)

    form_ii = all(m.get(v, v) == 0 for v in range(m.dim))
    if form_ii:
        s = strengthen(m)
        form_ii = is_coherent(s)
    if form_ii:
        dim = m.dim
        for u in range(dim):
            for v in range(dim):
                b1 = m.cells[u * dim + v]
                if b1 == INF:
                    continue
                for w in range(dim):
                    b2 = m.cells[v * dim + w]
                    if b2 == INF:
                        continue
                    if s.cells[u * dim + w] > b1 + b2:
                        form_ii = False
                        break
                if not form_ii:
                    break
            if not form_ii:
                break
    return form_i == form_ii


# -- lattice and transfer operations -------------------------------------------


def leq_dense(a: DenseDbm, b: DenseDbm) -> bool:
    """Pointwise order; complete for strongly closed left operands."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    return all(x <= y for x, y in zip(a.cells, b.cells))


def join_dense(a: DenseDbm, b: DenseDbm) -> DenseDbm:
    """Pointwise max: least upper bound, strong closure preserving."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    return DenseDbm(a.n_vars, [max(x, y) for x, y in zip(a.cells, b.cells)])


def forget_pot(x: int, m: DenseDbm) -> DenseDbm:
    """Drop all constraints mentioning the signed variable x."""
    out = m.copy()
    dim = m.dim
    for t in range(dim):
        out.cells[x * dim + t] = INF
        out.cells[t * dim + x] = INF
    out.cells[x * dim + x] = ZERO
    return out


def forget_oct(x: int, m: DenseDbm) -> DenseDbm:
    """Drop all constraints mentioning either occurrence of variable x."""
    return forget_pot(pos(x), forget_pot(neg(x), m))


def assume_pot(x: int, y: int, c: Bound, m: DenseDbm) -> DenseDbm:
    """Exact potential-level insertion of x - y <= c (x, y signed)."""
    if c == INF:
        raise ValueError("assumed bound must be finite")
    nums, dens = m._to_arrays()
    _kernels.assume_pot_cells(
        nums, dens, m.dim, x, y, c.numerator, c.denominator
    )
    return DenseDbm._from_arrays(m.n_vars, nums, dens)


def assume_oct(x: int, y: int, c: Bound, m: DenseDbm) -> OrEmpty:
    """Incremental octagonal assume on a strongly closed matrix.

    EMPTY exactly when the new constraint closes a negative cycle, i.e.
    c + B_yx < 0; otherwise the mirrored potential updates followed by one
    strengthening step, which keeps strongly closed matrices strongly
    closed.
    """
    if bound_add(c, m.get(y, x)) < 0:
        return EMPTY
    nums, dens = m._to_arrays()
    _kernels.assume_pot_cells(nums, dens, m.dim, x, y, c.numerator, c.denominator)
    _kernels.assume_pot_cells(
        nums, dens, m.dim, bar(y), bar(x), c.numerator, c.denominator
    )
    _kernels.strengthen_cells(nums, dens, m.dim)
    return DenseDbm._from_arrays(m.n_vars, nums, dens)


class ArrayDbm:
    """Mutable flat-array working state for the benchmark's dense runner.

    Semantically a strongly closed DenseDbm, but kept permanently in the
    kernel's (num, den) array encoding so per-operation boundary conversions
    disappear; this is how a production dense octagon implementation stores
    its matrix.  Only the benchmark uses it; the oracle API above stays
    immutable.
    """

    __slots__ = ("n_vars", "dim", "nums", "dens")

    def __init__(self, n_vars: int, nums: list[int], dens: list[int]):
        self.n_vars = n_vars
        self.dim = 2 * n_vars
        self.nums = nums
        self.dens = dens

    @classmethod
    def top(cls, n_vars: int) -> ArrayDbm:
        dim = 2 * n_vars
        nums = [1] * (dim * dim)
        dens = [0] * (dim * dim)
        for v in range(dim):
            nums[v * dim + v] = 0
            dens[v * dim + v] = 1
        return cls(n_vars, nums, dens)

    def copy(self) -> ArrayDbm:
        return ArrayDbm(self.n_vars, list(self.nums), list(self.dens))

    def assume_oct(self, x: int, y: int, c: Fraction) -> bool:
        """In-place incremental assume; False when the result would be empty."""
        i = y * self.dim + x
        if self.dens[i] != 0 and c.denominator * self.nums[i] + self.dens[i] * c.numerator < 0:
            return False
        _kernels.assume_pot_cells(
            self.nums, self.dens, self.dim, x, y, c.numerator, c.denominator
        )
        _kernels.assume_pot_cells(
            self.nums, self.dens, self.dim, bar(y), bar(x), c.numerator, c.denominator
        )
        _kernels.strengthen_cells(self.nums, self.dens, self.dim)
        return True

    def join(self, other: ArrayDbm) -> None:
        nums, dens = self.nums, self.dens
        onums, odens = other.nums, other.dens
        for i in range(len(nums)):
            d1, d2 = dens[i], odens[i]
            if d1 == 0:
                continue
            if d2 == 0 or nums[i] * d2 < onums[i] * d1:
                nums[i] = onums[i]
                dens[i] = d2

    def leq(self, other: ArrayDbm) -> bool:
        nums, dens = self.nums, self.dens
        onums, odens = other.nums, other.dens
        for i in range(len(nums)):
            d2 = odens[i]
            if d2 == 0:
                continue
            d1 = dens[i]
            if d1 == 0 or nums[i] * d2 > onums[i] * d1:
                return False
        return True

    def forget_oct(self, x: int) -> None:
        dim = self.dim
        for s in (pos(x), neg(x)):
            base = s * dim
            for t in range(dim):
                self.nums[base + t] = 1
                self.dens[base + t] = 0
                self.nums[t * dim + s] = 1
                self.dens[t * dim + s] = 0
            self.nums[base + s] = 0
            self.dens[base + s] = 1

    def nnz_off_diagonal(self) -> int:
        return len(self.dens) - self.dens.count(0) - self.dim

    def to_dense(self) -> DenseDbm:
        return DenseDbm._from_arrays(self.n_vars, list(self.nums), list(self.dens))
