"""Sparse DBMs kept weakly closed.

Strong closure is the usual canonical form for octagons, but its
strengthening step fills in a quadratic number of cells as soon as many
variables carry interval bounds.  This module instead keeps matrices *weakly
closed*: null diagonal, and strengthening them *would* produce a strongly
closed matrix.  Strengthening is never materialized; whenever an operation
needs the strengthened value of a cell it computes the half-sum of the two
relevant unary cells on the fly.  All operations below preserve weak
closedness and sparsity, and their strengthened results coincide exactly
with what the classic dense operations produce on strengthened inputs (the
test suite checks this against :mod:`weakoct.dense` cell by cell).

Representation: one dict per row over 2n signed variables, holding only
finite off-diagonal cells (absence is +infinity, the diagonal is implicitly
zero).  Mirror cells are stored on both sides: (u, v) is present if and only
if (v̄, ū) is, with the same bound, so row iteration never needs mirror
lookups.  Rows are shared structurally between values; operations copy a row
before the first write, which keeps untouched rows object-identical across
operations (the sparsity-conservation guarantee).

Integer mode additionally keeps every bound integral and every unary cell
even ("weakly tightly closed"); inserting a constraint is the only operation
that must re-tighten.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Sequence, Union

from . import dense
from .core import (
    EMPTY,
    INF,
    ZERO,
    Bound,
    Constraint,
    IntegerModeError,
    Mode,
    bar,
    bound_add,
    bound_half,
    is_integral,
    neg,
    pos,
)

#: Below this signed dimension, initial closure goes through the dense kernel.
DENSE_CLOSURE_THRESHOLD = 64


class SparseDbm:
    """Weakly closed sparse DBM; immutable once constructed."""

    __slots__ = ("n_vars", "dim", "mode", "rows", "_nnz")

    def __init__(self, n_vars: int, rows: list[dict[int, Bound]], mode: Mode):
        self.n_vars = n_vars
        self.dim = 2 * n_vars
        self.mode = mode
        self.rows = rows
        self._nnz: int | None = None

    @property
    def nnz(self) -> int:
        """Stored (finite, off-diagonal) cell count, mirrors included."""
        if self._nnz is None:
            self._nnz = sum(map(len, self.rows))
        return self._nnz

    @classmethod
    def top(cls, n_vars: int, mode: Mode = Mode.RATIONAL) -> SparseDbm:
        return cls(n_vars, [{} for _ in range(2 * n_vars)], mode)

    def cell(self, u: int, v: int) -> Bound:
        if u == v:
            return ZERO
        return self.rows[u].get(v, INF)

    def unary(self, u: int) -> Bound:
        """Bound of the unary cell (u, ū), i.e. on 2 * value(u)."""
        return self.rows[u].get(u ^ 1, INF)

    def unary_index(self) -> list[tuple[int, Bound]]:
        """Signed variables with a finite unary cell, ascending code order.

        Derived from the rows on demand; instances are immutable, so the
        index can never go stale.
        """
        out = []
        for u in range(self.dim):
            b = self.rows[u].get(u ^ 1)
            if b is not None:
                out.append((u, b))
        return out

    def items(self) -> Iterator[tuple[int, int, Bound]]:
        """All stored cells (both mirror copies), row-major order."""
        for u in range(self.dim):
            for v, b in self.rows[u].items():
                yield u, v, b

    def canonical_items(self) -> Iterator[tuple[int, int, Bound]]:
        """One representative per mirror pair (the lexicographically smaller)."""
        for u, v, b in self.items():
            if (u, v) <= (bar(v), bar(u)):
                yield u, v, b

    def to_dense(self) -> dense.DenseDbm:
        """Dense copy of this matrix, *without* strengthening."""
        m = dense.DenseDbm.top(self.n_vars)
        for u, v, b in self.items():
            m.set(u, v, b)
        return m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseDbm):
            return NotImplemented
        return (
            self.n_vars == other.n_vars
            and self.mode == other.mode
            and self.rows == other.rows
        )

    def __repr__(self) -> str:
        entries = ", ".join(f"({u},{v})={b}" for u, v, b in self.canonical_items())
        return f"SparseDbm(n={self.n_vars}, {self.mode.value}, {{{entries}}})"

    def validate(self, check_closedness: bool = True) -> None:
        """Assert the representation invariants (test/debug helper).

        Checks storage well-formedness (no stored infinity or diagonal,
        mirror-complete support with equal bounds, integer-mode integrality
        and evenness) and, unless disabled, weak closedness via the dense
        oracle.
        """
        for u, v, b in self.items():
            assert u != v, f"stored diagonal cell ({u},{v})"
            assert b != INF, f"stored infinite cell ({u},{v})"
            mirror = self.rows[bar(v)].get(bar(u))
            assert mirror == b, f"mirror mismatch at ({u},{v}): {b} vs {mirror}"
            if self.mode is Mode.INTEGER:
                assert is_integral(b), f"non-integral cell ({u},{v})={b}"
                if v == bar(u):
                    assert b.numerator % 2 == 0, f"odd unary cell ({u},{v})={b}"
        if check_closedness:
            assert dense.is_weakly_closed(self.to_dense()), "not weakly closed"


OrEmpty = Union[SparseDbm, type(EMPTY)]


def nnz(m: SparseDbm) -> int:
    """Number of stored (finite, off-diagonal) cells, mirrors included."""
    return m.nnz


def is_weakly_closed(m: SparseDbm) -> bool:
    """Oracle check of the module invariant (weakly tightly closed in
    integer mode)."""
    d = m.to_dense()
    if not dense.is_weakly_closed(d):
        return False
    if m.mode is Mode.INTEGER:
        for u, v, b in m.items():
            if not is_integral(b) or (v == bar(u) and b.numerator % 2):
                return False
    return True


# -- construction ---------------------------------------------------------------


def _rows_from_dense(m: dense.DenseDbm, mode: Mode) -> SparseDbm:
    rows: list[dict[int, Bound]] = [{} for _ in range(m.dim)]
    for u, v, b in m.finite_items():
        if u != v:
            rows[u][v] = b
    return SparseDbm(m.n_vars, rows, mode)


def _sparse_all_pairs(
    n_vars: int, cells: dict[tuple[int, int], Fraction]
) -> OrEmpty:
    """Closure by single-source Bellman-Ford from every vertex with
    outgoing edges; detects negative cycles.  Used above the dense-closure
    threshold, where the cell graph is expected to be sparse."""
    dim = 2 * n_vars
    adj: dict[int, list[tuple[int, Fraction]]] = {}
    for (u, v), b in cells.items():
        adj.setdefault(u, []).append((v, b))
    rows: list[dict[int, Bound]] = [{} for _ in range(dim)]
    for source in adj:
        dist: dict[int, Fraction] = {source: ZERO}
        for _ in range(dim):
            changed = False
            for u, edges in adj.items():
                du = dist.get(u)
                if du is None:
                    continue
                for v, w in edges:
                    nd = du + w
                    old = dist.get(v)
                    if old is None or nd < old:
                        dist[v] = nd
                        changed = True
            if not changed:
                break
        else:
            if changed:
                return EMPTY
        if dist[source] < 0:
            return EMPTY
        row = rows[source]
        for v, d in dist.items():
            if v != source:
                row[v] = d
    return SparseDbm(n_vars, rows, Mode.RATIONAL)


def from_constraints(
    cs: Sequence[Constraint],
    n_vars: int,
    mode: Mode = Mode.RATIONAL,
    dense_threshold: int = DENSE_CLOSURE_THRESHOLD,
) -> OrEmpty:
    """Weakly closed matrix of a constraint conjunction, or EMPTY.

    The constraints are folded coherently (each one lands in both mirror
    cells), closed, and checked for emptiness; a closed coherent matrix is
    always weakly closed.  Integer mode then tightens, which may itself
    discover integer unsatisfiability.
    """
    dim = 2 * n_vars
    cells: dict[tuple[int, int], Fraction] = {}
    for u, v, b in cs:
        if not (0 <= u < dim and 0 <= v < dim):
            raise ValueError(f"signed variable out of range in {(u, v, b)}")
        if mode is Mode.INTEGER and not is_integral(b):
            raise IntegerModeError(f"non-integral constraint bound {b}")
        if u == v:
            if b < 0:
                return EMPTY
            continue
        for key in ((u, v), (bar(v), bar(u))):
            if b < cells.get(key, INF):
                cells[key] = b

    if dim <= dense_threshold:
        closed = dense.close(dense.DenseDbm.from_cells(n_vars, cells))
        if closed is EMPTY:
            return EMPTY
        result = _rows_from_dense(closed, mode)
    else:
        result = _sparse_all_pairs(n_vars, cells)
        if result is EMPTY:
            return EMPTY
        result = SparseDbm(n_vars, result.rows, mode)

    # octagonal emptiness: cannot fire after a successful closure of a
    # coherent matrix (closure forces 0 <= B_uu <= B_uū + B_ūu), kept as a
    # defensive guard
    for u, b in result.unary_index():
        if bound_add(b, result.unary(bar(u))) < 0:
            return EMPTY

    if mode is Mode.INTEGER:
        return tighten_weak(result)
    return result


# -- comparison ------------------------------------------------------------------


def _check_compatible(a: SparseDbm, b: SparseDbm) -> None:
    if a.n_vars != b.n_vars:
        raise ValueError("dimension mismatch")
    if a.mode is not b.mode:
        raise ValueError("mode mismatch")


def leq_weak(a: SparseDbm, b: SparseDbm) -> bool:
    """Inclusion of concretizations, for weakly closed ``a``.

    Each finite cell of ``b`` must be entailed either directly by the
    corresponding cell of ``a`` or by the half-sum of a's unary cells; on
    weakly closed left operands this is exactly concretization inclusion
    (b need not be closed in any sense).
    """
    _check_compatible(a, b)
    arows = a.rows
    for u in range(b.dim):
        brow = b.rows[u]
        if not brow:
            continue
        arow = arows[u]
        if arow is brow:
            continue
        a_unary = arow.get(u ^ 1, INF)
        for v, bound in brow.items():
            if arow.get(v, INF) <= bound:
                continue
            if bound_half(bound_add(a_unary, arows[v ^ 1].get(v, INF))) <= bound:
                continue
            return False
    return True


# -- join ------------------------------------------------------------------------


def join_weak(a: SparseDbm, b: SparseDbm) -> SparseDbm:
    """Sparsity-preserving least upper bound of two weakly closed matrices.

    Cellwise step over cells finite in either operand first: where one side
    is larger, the smaller side may substitute the half-sum of its unary
    cells, which is how interval information flows into relational cells
    without materializing a strengthening.  A second step patches exactly
    the cells whose two unary comparisons disagree in opposite directions,
    enumerated from the two lists of discordant signed variables.  The
    strengthening of the result equals the pointwise-max join of the two
    strengthenings.
    """
    _check_compatible(a, b)
    dim = a.dim
    arows, brows = a.rows, b.rows

    def half(rows: list[dict[int, Bound]], u: int, v: int) -> Bound:
        return bound_half(
            bound_add(rows[u].get(u ^ 1, INF), rows[v ^ 1].get(v, INF))
        )

    new_rows: list[dict[int, Bound]] = [None] * dim  # type: ignore[list-item]
    for u in range(dim):
        arow, brow = arows[u], brows[u]
        if arow is brow:
            new_rows[u] = arow  # structural sharing: untouched rows stay identical
            continue
        row: dict[int, Bound] = {}
        for v in arow.keys() | brow.keys():
            av = arow.get(v, INF)
            bv = brow.get(v, INF)
            if av == bv:
                row[v] = av
            elif av < bv:
                val = max(av, min(bv, half(brows, u, v)))
                if val != INF:
                    row[v] = val
            else:
                val = max(bv, min(av, half(arows, u, v)))
                if val != INF:
                    row[v] = val
        new_rows[u] = row

    lower = []  # u with A_uū < B_uū
    higher = []  # u with A_uū > B_uū
    for u in range(dim):
        au = arows[u].get(u ^ 1, INF)
        bu = brows[u].get(u ^ 1, INF)
        if au < bu:
            lower.append(u)
        elif bu < au:
            higher.append(u)

    def patch(u: int, w: int) -> None:
        v = w ^ 1
        if v == u:
            return  # diagonal: the override is provably >= 0, the diagonal stays 0
        val = max(half(arows, u, v), half(brows, u, v))
        if val == INF:
            return
        if val < new_rows[u].get(v, INF):
            new_rows[u][v] = val

    for u in lower:
        for w in higher:
            patch(u, w)
    for u in higher:
        for w in lower:
            patch(u, w)

    return SparseDbm(a.n_vars, new_rows, a.mode)


# -- forget ----------------------------------------------------------------------


def forget_weak(x: int, m: SparseDbm) -> SparseDbm:
    """Drop every constraint mentioning variable x; weakly closed stays so.

    Mirror-complete storage means the rows of x+ and x- list every cell
    involving x, so only those rows (and the mirror entries they point at)
    are touched.
    """
    rows = list(m.rows)
    copied: set[int] = set()

    def writable(r: int) -> dict[int, Bound]:
        if r not in copied:
            rows[r] = dict(rows[r])
            copied.add(r)
        return rows[r]

    for s in (pos(x), neg(x)):
        for v in m.rows[s]:
            r = bar(v)
            if r >> 1 == x:
                continue
            writable(r).pop(bar(s), None)
        rows[s] = {}
    return SparseDbm(m.n_vars, rows, m.mode)


# -- assume ----------------------------------------------------------------------


def assume_weak(u: int, v: int, c: Bound, m: SparseDbm) -> OrEmpty:
    """Insert the constraint u - v <= c into a weakly closed matrix.

    Emptiness is decided up front by two scalar tests: the new constraint
    must not close a negative cycle either directly (0 <= c + B_vu) or
    through the strengthened unary cells (0 <= 2c + B_vv̄ + B_ūu).  When
    both pass, the potential-level update runs for (u, v) and then for the
    mirror constraint (v̄, ū), touching only cells with a finite entry in
    the column of u / row of v (and their step-two counterparts); the result
    is weakly closed again.  Integer mode re-tightens the unary cells the
    update changed and re-checks integer emptiness.
    """
    if c == INF:
        raise ValueError("assumed bound must be finite")
    if m.mode is Mode.INTEGER and not is_integral(c):
        raise IntegerModeError(f"non-integral assumed bound {c}")
    if not (0 <= u < m.dim and 0 <= v < m.dim):
        raise ValueError("signed variable out of range")

    if bound_add(c, m.cell(v, u)) < 0:
        return EMPTY
    if bound_add(bound_add(2 * c, m.cell(v, bar(v))), m.cell(bar(u), u)) < 0:
        return EMPTY

    rows = list(m.rows)
    copied: set[int] = set()
    touched_unaries: set[int] = set()

    def writable(r: int) -> dict[int, Bound]:
        if r not in copied:
            rows[r] = dict(rows[r])
            copied.add(r)
        return rows[r]

    def current(a: int, b: int) -> Bound:
        if a == b:
            return ZERO
        return rows[a].get(b, INF)

    def apply_pot(col: list[tuple[int, Bound]], row: list[tuple[int, Bound]]) -> None:
        # cell(a, b) := min(cell(a, b), col-bound(a) + c + row-bound(b));
        # col/row are snapshots, so the update is simultaneous.  Each (a, b)
        # pair occurs once, hence reading the live target is equivalent.
        for a, da in col:
            base = da + c
            for b, db in row:
                if a == b:
                    continue
                cand = base + db
                if cand < current(a, b):
                    writable(a)[b] = cand
                    if b == (a ^ 1):
                        touched_unaries.add(a)

    # step 1: constraint (u, v).  The column of u is the bar-image of the row
    # of ū (mirror-complete storage), plus the implicit diagonal zero.
    col1 = [(u, ZERO)] + [(bar(k), b) for k, b in m.rows[bar(u)].items()]
    row1 = [(v, ZERO)] + list(m.rows[v].items())
    apply_pot(col1, row1)

    # step 2: mirror constraint (v̄, ū).  The step-1 result is not coherent,
    # so its column of v̄ cannot be read through a mirror row; instead the
    # candidate support is derived from the original matrix (a cell of the
    # updated column/row is finite only if it was finite before or lies on a
    # path through the new edge) and the values are read from the live rows.
    cand_a = {bar(v)} | {bar(b) for b, _ in row1}
    if m.cell(v, bar(v)) != INF:
        cand_a |= {a for a, _ in col1}
    cand_b = {bar(u)} | {bar(a) for a, _ in col1}
    if m.cell(bar(u), u) != INF:
        cand_b |= {b for b, _ in row1}
    col2 = [(a, current(a, bar(v))) for a in sorted(cand_a)]
    row2 = [(b, current(bar(u), b)) for b in sorted(cand_b)]
    apply_pot(
        [(a, da) for a, da in col2 if da != INF],
        [(b, db) for b, db in row2 if db != INF],
    )

    if m.mode is Mode.INTEGER and touched_unaries:
        for a in touched_unaries:
            bnd = rows[a][a ^ 1]
            if bnd.numerator % 2:
                writable(a)[a ^ 1] = bnd - 1
        for a in touched_unaries:
            if bound_add(current(a, a ^ 1), current(a ^ 1, a)) < 0:
                return EMPTY

    return SparseDbm(m.n_vars, rows, m.mode)


# -- tightening ------------------------------------------------------------------


def tighten_weak(m: SparseDbm) -> OrEmpty:
    """Round odd unary cells down by one; EMPTY when no integer point is left.

    The input must be weakly closed with integral cells; the result (when
    non-EMPTY) is weakly tightly closed and is returned in integer mode.
    """
    for _, _, b in m.items():
        if not is_integral(b):
            raise IntegerModeError(f"non-integral bound {b} in integer mode")
    rows = list(m.rows)
    copied: set[int] = set()
    for stored_u, b in m.unary_index():
        if b.numerator % 2:
            if stored_u not in copied:
                rows[stored_u] = dict(rows[stored_u])
                copied.add(stored_u)
            rows[stored_u][stored_u ^ 1] = b - 1
    out = SparseDbm(m.n_vars, rows, Mode.INTEGER)
    for u, b in out.unary_index():
        if bound_add(b, out.unary(bar(u))) < 0:
            return EMPTY
    return out


# -- export and queries ----------------------------------------------------------


def strengthen_export(m: SparseDbm) -> dense.DenseDbm:
    """Materialize the strengthening: the strongly closed dense equivalent.

    In integer mode the result is tightly closed as-is (unary cells are even,
    so the half-sums the strengthening introduces are integral).
    """
    return dense.strengthen(m.to_dense())


def bounds_of(x: int, m: SparseDbm) -> tuple[Fraction | None, Bound]:
    """Interval of variable x: (lower or None when unbounded below, upper).

    Unary cells of a weakly closed matrix are canonical, so reading them is
    exact: the upper bound is half the (x+, x-) cell, the lower bound minus
    half the (x-, x+) cell.
    """
    up = m.cell(pos(x), neg(x))
    lo = m.cell(neg(x), pos(x))
    upper = bound_half(up)
    lower = None if lo == INF else -bound_half(lo)
    return lower, upper
