"""User-facing abstract domain: Bottom lifting, assignment, widening.

An :class:`OctValue` pairs a weakly closed sparse matrix with a variable
name table, or is Bottom (the unsatisfiable value).  Weakly closed matrices
always describe at least one state, so Bottom lives here rather than inside
the matrix representation.

Widening intentionally produces a value that is *not* weakly closed (cells
are kept or dropped pointwise, never re-closed; re-closing could undo the
extrapolation and break termination).  Such a value is flagged and may only
be used as the right operand of ``leq`` and as the accumulator fed back to
``widen``; fixpoint clients re-close it once iteration stabilizes, which
:meth:`OctValue.reclosed` does via constraint reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from . import sparse
from .core import (
    EMPTY,
    INF,
    Bound,
    Constraint,
    IntegerModeError,
    Mode,
    neg,
    pos,
)
from .sparse import SparseDbm


@dataclass(frozen=True)
class WidenConfig:
    """Fixpoint iteration knobs: joins before widening, and a bailout."""

    delay: int = 1
    max_iterations: int = 64

    def __post_init__(self):
        if self.delay < 0 or self.max_iterations <= self.delay:
            raise ValueError("need 0 <= delay < max_iterations")


@dataclass(frozen=True, eq=False)
class OctValue:
    """Bottom, or a sparse octagon over named variables.

    ``closed`` records whether the payload is weakly closed; only widening
    produces values with ``closed=False``.  Equality ignores that flag (it
    is bookkeeping, not semantics).
    """

    names: tuple[str, ...]
    mode: Mode
    dbm: SparseDbm | None
    closed: bool = True

    # -- construction --------------------------------------------------------

    @classmethod
    def top(cls, names: Iterable[str], mode: Mode = Mode.RATIONAL) -> OctValue:
        names = tuple(names)
        return cls(names, mode, SparseDbm.top(len(names), mode))

    @classmethod
    def bottom(cls, names: Iterable[str], mode: Mode = Mode.RATIONAL) -> OctValue:
        return cls(tuple(names), mode, None)

    def _with(self, result: Union[SparseDbm, type(EMPTY)], closed: bool = True) -> OctValue:
        if result is EMPTY:
            return OctValue(self.names, self.mode, None)
        return OctValue(self.names, self.mode, result, closed)

    # -- basic queries --------------------------------------------------------

    @property
    def is_bottom(self) -> bool:
        return self.dbm is None

    def var(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}") from None

    def nnz(self) -> int:
        return 0 if self.dbm is None else self.dbm.nnz

    def bounds(self, name: str) -> tuple[Fraction | None, Bound]:
        if self.dbm is None:
            raise ValueError("bottom has no variable bounds")
        return sparse.bounds_of(self.var(name), self.dbm)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OctValue):
            return NotImplemented
        return (
            self.names == other.names
            and self.mode == other.mode
            and self.dbm == other.dbm
        )

    def _check_peer(self, other: OctValue) -> None:
        if self.names != other.names or self.mode is not other.mode:
            raise ValueError("operands come from different variable tables")

    def _require_closed(self, *values: OctValue) -> None:
        for v in values:
            if v.dbm is not None and not v.closed:
                raise ValueError("operation needs a weakly closed operand")

    # -- lattice ---------------------------------------------------------------

    def leq(self, other: OctValue) -> bool:
        """Concretization inclusion; right operand may be a widened value."""
        self._check_peer(other)
        if self.dbm is None:
            return True
        if other.dbm is None:
            return False
        self._require_closed(self)
        return sparse.leq_weak(self.dbm, other.dbm)

    def join(self, other: OctValue) -> OctValue:
        self._check_peer(other)
        if self.dbm is None:
            return other
        if other.dbm is None:
            return self
        self._require_closed(self, other)
        return self._with(sparse.join_weak(self.dbm, other.dbm))

    def meet(self, other: OctValue) -> OctValue:
        """Greatest lower bound, by inserting every cell of ``other``.

        Constraint insertion is exact, so the meet is exact as well; the
        incremental route preserves weak closedness without any re-closure.
        """
        self._check_peer(other)
        if self.dbm is None or other.dbm is None:
            return OctValue(self.names, self.mode, None)
        self._require_closed(self, other)
        acc = self.dbm
        for u, v, b in other.dbm.canonical_items():
            result = sparse.assume_weak(u, v, b, acc)
            if result is EMPTY:
                return OctValue(self.names, self.mode, None)
            acc = result
        return self._with(acc)

    # -- transfer functions -----------------------------------------------------

    def assume(self, u: int, v: int, c: Bound) -> OctValue:
        """Constrain with u - v <= c over signed variable codes."""
        if self.dbm is None:
            return self
        self._require_closed(self)
        return self._with(sparse.assume_weak(u, v, c, self.dbm))

    def havoc(self, name: str) -> OctValue:
        if self.dbm is None:
            return self
        self._require_closed(self)
        return self._with(sparse.forget_weak(self.var(name), self.dbm))

    def assign(self, name: str, rhs: Rhs) -> OctValue:
        """Assignment of an octagonal right-hand side to ``name``.

        Supported forms: a constant, ``±y + c`` for a different variable y,
        the self-update ``±x + c``, and the nondeterministic ``?``.  The
        self-update goes through a temporary dimension (constrain t = x + c,
        forget x, move t into x's slot), which is exact.
        """
        if self.dbm is None:
            return self
        self._require_closed(self)
        x = self.var(name)
        if isinstance(rhs, Nondet):
            return self._with(sparse.forget_weak(x, self.dbm))
        if isinstance(rhs, ConstRhs):
            if self.mode is Mode.INTEGER and rhs.value.denominator != 1:
                raise IntegerModeError(f"fractional constant {rhs.value} assigned")
            c = 2 * rhs.value
            m = sparse.forget_weak(x, self.dbm)
            m = sparse.assume_weak(pos(x), neg(x), c, m)
            if m is not EMPTY:
                m = sparse.assume_weak(neg(x), pos(x), -c, m)
            return self._with(m)
        if not isinstance(rhs, VarRhs):
            raise ValueError(f"non-octagonal right-hand side {rhs!r}")
        y = self.var(rhs.var)
        offset = rhs.offset
        if self.mode is Mode.INTEGER and offset.denominator != 1:
            raise IntegerModeError(f"fractional offset {offset} assigned")
        src = neg(y) if rhs.negated else pos(y)
        if y != x:
            m = sparse.forget_weak(x, self.dbm)
            m = sparse.assume_weak(pos(x), src, offset, m)
            if m is not EMPTY:
                m = sparse.assume_weak(src, pos(x), -offset, m)
            return self._with(m)
        # self-update through a temporary dimension
        t = self.dbm.n_vars
        widened = SparseDbm(t + 1, list(self.dbm.rows) + [{}, {}], self.mode)
        m = sparse.assume_weak(pos(t), src, offset, widened)
        if m is not EMPTY:
            m = sparse.assume_weak(src, pos(t), -offset, m)
        if m is EMPTY:
            return OctValue(self.names, self.mode, None)
        m = sparse.forget_weak(x, m)
        m = _swap_vars(m, x, t)
        m = _drop_last_var(m)
        return self._with(m)

    # -- variable management ------------------------------------------------------

    def add_var(self, name: str) -> OctValue:
        if name in self.names:
            raise ValueError(f"variable {name!r} already present")
        names = self.names + (name,)
        if self.dbm is None:
            return OctValue(names, self.mode, None)
        self._require_closed(self)
        dbm = SparseDbm(self.dbm.n_vars + 1, list(self.dbm.rows) + [{}, {}], self.mode)
        return OctValue(names, self.mode, dbm)

    def remove_var(self, name: str) -> OctValue:
        x = self.var(name)
        names = self.names[:x] + self.names[x + 1 :]
        if self.dbm is None:
            return OctValue(names, self.mode, None)
        self._require_closed(self)
        m = sparse.forget_weak(x, self.dbm)
        rows = m.rows[: pos(x)] + m.rows[pos(x) + 2 :]

        def shift(k: int) -> int:
            return k - 2 if k > neg(x) else k

        rows = [{shift(k): b for k, b in row.items()} for row in rows]
        return OctValue(names, self.mode, SparseDbm(m.n_vars - 1, rows, self.mode))

    # -- widening -------------------------------------------------------------------

    def widen(self, next_value: OctValue, cfg: WidenConfig, iteration: int) -> OctValue:
        """Extrapolate an ascending chain: keep stable cells, drop growing ones.

        Below ``cfg.delay`` this is a plain join.  The widened result keeps a
        cell of the accumulator only where the new value still entails it, so
        the finite support can only shrink: termination.  Past
        ``cfg.max_iterations`` every variable still involved in a growing
        cell is forgotten outright.
        """
        self._check_peer(next_value)
        if self.dbm is None:
            return next_value
        if next_value.dbm is None:
            return self
        next_value._require_closed(next_value)
        if iteration < cfg.delay:
            self._require_closed(self)
            return self.join(next_value)
        prev, nxt = self.dbm, next_value.dbm
        rows: list[dict[int, Bound]] = []
        unstable_vars: set[int] = set()
        for u in range(prev.dim):
            prow = prev.rows[u]
            nrow = nxt.rows[u]
            if prow is nrow:
                rows.append(prow)
                continue
            kept = {v: b for v, b in prow.items() if nrow.get(v, INF) <= b}
            rows.append(kept)
            if len(kept) != len(prow):
                unstable_vars.add(u >> 1)
                unstable_vars.update(v >> 1 for v in prow if v not in kept)
        if iteration >= cfg.max_iterations and unstable_vars:
            dropped = {s for var in unstable_vars for s in (pos(var), neg(var))}
            rows = [
                {}
                if u in dropped
                else {v: b for v, b in row.items() if v not in dropped}
                for u, row in enumerate(rows)
            ]
        result = SparseDbm(prev.n_vars, rows, self.mode)
        return OctValue(self.names, self.mode, result, closed=False)

    def reclosed(self) -> OctValue:
        """Rebuild a weakly closed value with the same concretization."""
        if self.dbm is None or self.closed:
            return self
        cs = [Constraint(u, v, b) for u, v, b in self.dbm.canonical_items()]
        rebuilt = sparse.from_constraints(cs, self.dbm.n_vars, self.mode)
        # cells of a widened accumulator over-approximate a satisfiable value
        assert rebuilt is not EMPTY
        return OctValue(self.names, self.mode, rebuilt)


# -- right-hand sides of assignments ------------------------------------------------


@dataclass(frozen=True)
class ConstRhs:
    value: Fraction


@dataclass(frozen=True)
class VarRhs:
    """±var + offset."""

    var: str
    negated: bool = False
    offset: Fraction = Fraction(0)


@dataclass(frozen=True)
class Nondet:
    pass


Rhs = Union[ConstRhs, VarRhs, Nondet]


def _swap_vars(m: SparseDbm, i: int, j: int) -> SparseDbm:
    """Exchange the slots of variables i and j (codes 2i/2i+1 and 2j/2j+1)."""
    if i == j:
        return m
    perm = list(range(m.dim))
    perm[pos(i)], perm[pos(j)] = pos(j), pos(i)
    perm[neg(i)], perm[neg(j)] = neg(j), neg(i)
    rows: list[dict[int, Bound]] = [{} for _ in range(m.dim)]
    for u in range(m.dim):
        rows[perm[u]] = {perm[v]: b for v, b in m.rows[u].items()}
    return SparseDbm(m.n_vars, rows, m.mode)


def _drop_last_var(m: SparseDbm) -> SparseDbm:
    """Remove the final (unconstrained) dimension."""
    last_pos, last_neg = pos(m.n_vars - 1), neg(m.n_vars - 1)
    assert not m.rows[last_pos] and not m.rows[last_neg]
    return SparseDbm(m.n_vars - 1, m.rows[:last_pos], m.mode)
