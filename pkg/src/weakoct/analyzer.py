"""Forward abstract interpretation of the mini language over octagons.

Branches join, loops iterate with delayed widening followed by one verified
descending pass, and assert statements are checked by inclusion against the
octagon of the asserted condition.  Strict comparisons are exact in integer
mode (shift by one) and soundly relaxed to non-strict in rational mode, with
a warning; non-octagonal expressions and conditions degrade to havoc /
no-refinement, again with a warning, so realistic snippets analyze instead
of erroring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .core import Constraint, IntegerModeError, Mode, bar, neg, pos, svar_text
from .domain import ConstRhs, Nondet, OctValue, VarRhs, WidenConfig
from .lang import (
    Assert,
    Assign,
    Assume,
    Cond,
    CondLike,
    Havoc,
    If,
    NonOctCond,
    Program,
    Stmt,
    While,
    parse_program,
)
from .sparse import bounds_of

_NEGATED_OP = {"<=": ">", "<": ">=", ">=": "<", ">": "<=", "==": None}


@dataclass(frozen=True)
class PointRecord:
    pid: int
    kind: str  # entry | after | loop-head | exit
    line: int
    label: str
    state: OctValue


@dataclass(frozen=True)
class AssertRecord:
    pid: int
    line: int
    text: str
    proven: bool


@dataclass
class AnalysisResult:
    names: tuple[str, ...]
    mode: Mode
    points: list[PointRecord] = field(default_factory=list)
    asserts: list[AssertRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def all_proven(self) -> bool:
        return all(a.proven for a in self.asserts)


def negate(cond: Cond) -> CondLike | None:
    """Negated condition, or None when not octagonally representable."""
    op = _NEGATED_OP[cond.op]
    if op is None:
        return None
    return Cond(cond.terms, op, cond.const, f"not({cond.text})")


def _ceil(c: Fraction) -> int:
    return math.ceil(c)


def cond_constraints(
    cond: Cond, var_index: dict[str, int], mode: Mode
) -> tuple[list[Constraint], bool, list[str]]:
    """Signed-form constraints of a condition.

    Returns (constraints, feasible, warnings); ``feasible=False`` flags the
    degenerate always-false case (e.g. ``x - x <= -1``), in which case the
    constraint list is meaningless.  Strict comparisons shift the bound in
    integer mode and are relaxed (with a warning) in rational mode;
    fractional bounds on integer cells are floored, which is exact.
    """
    warnings: list[str] = []

    def one_side(terms: tuple[tuple[int, str], ...], op: str, c: Fraction):
        # normalize >= / > to <= / < on negated terms
        if op in (">=", ">"):
            terms = tuple((-s, x) for s, x in terms)
            c = -c
            op = "<=" if op == ">=" else "<"
        if len(terms) == 1 or (
            len(terms) == 2
            and terms[0][1] == terms[1][1]
            and terms[0][0] == terms[1][0]
        ):
            s, x = terms[0]
            u = pos(var_index[x]) if s > 0 else neg(var_index[x])
            v = bar(u)
            raw = 2 * c if len(terms) == 1 else c
        else:
            (s1, x), (s2, y) = terms
            if x == y:  # opposite signs on the same variable: 0 <= c
                if op == "<":
                    if mode is Mode.INTEGER:
                        c = Fraction(_ceil(c) - 1)
                    else:
                        warnings.append("strict comparison treated as non-strict")
                return [], c >= 0
            u = pos(var_index[x]) if s1 > 0 else neg(var_index[x])
            v = bar(pos(var_index[y]) if s2 > 0 else neg(var_index[y]))
            raw = c
        if op == "<":
            if mode is Mode.INTEGER:
                raw = Fraction(_ceil(raw) - 1)
            else:
                warnings.append("strict comparison treated as non-strict")
        elif mode is Mode.INTEGER and raw.denominator != 1:
            raw = Fraction(math.floor(raw))
        return [Constraint(u, v, raw)], True

    sides = [(cond.terms, cond.op, cond.const)]
    if cond.op == "==":
        sides = [
            (cond.terms, "<=", cond.const),
            (cond.terms, ">=", cond.const),
        ]
    constraints: list[Constraint] = []
    for terms, op, c in sides:
        cs, feasible = one_side(terms, op, c)
        if not feasible:
            return [], False, warnings
        constraints.extend(cs)
    return constraints, True, warnings


class Analyzer:
    def __init__(self, program: Program, cfg: WidenConfig, mode: Mode):
        self.program = program
        self.cfg = cfg
        self.mode = mode
        self.var_index = {name: i for i, name in enumerate(program.names)}
        self.result = AnalysisResult(program.names, mode)
        self._warned: set[str] = set()
        self._pid = 0

    # -- bookkeeping -----------------------------------------------------------

    def warn(self, line: int, message: str) -> None:
        full = f"line {line}: {message}"
        if full not in self._warned:
            self._warned.add(full)
            self.result.warnings.append(full)

    def fresh_pid(self) -> int:
        pid = self._pid
        self._pid += 1
        return pid

    def record(self, kind: str, line: int, label: str, state: OctValue) -> None:
        self.result.points.append(
            PointRecord(self.fresh_pid(), kind, line, label, state)
        )

    # -- conditions -------------------------------------------------------------

    def apply_cond(self, state: OctValue, cond: CondLike, line: int) -> OctValue:
        """Refine a state with a condition (identity when not representable)."""
        if state.is_bottom:
            return state
        if isinstance(cond, NonOctCond):
            self.warn(line, f"non-octagonal condition '{cond.text}' ignored")
            return state
        constraints, feasible, warnings = cond_constraints(
            cond, self.var_index, self.mode
        )
        for w in warnings:
            self.warn(line, f"{w} in '{cond.text}'")
        if not feasible:
            return OctValue.bottom(state.names, state.mode)
        for u, v, b in constraints:
            state = state.assume(u, v, b)
            if state.is_bottom:
                break
        return state

    def check_assert(self, state: OctValue, cond: CondLike, line: int) -> bool:
        if state.is_bottom:
            return True
        if isinstance(cond, NonOctCond):
            self.warn(line, f"non-octagonal assertion '{cond.text}' not checked")
            return False
        constraints, feasible, warnings = cond_constraints(
            cond, self.var_index, self.mode
        )
        for w in warnings:
            self.warn(line, f"{w} in '{cond.text}'")
        if not feasible:
            return False
        target = OctValue.top(state.names, state.mode)
        for u, v, b in constraints:
            target = target.assume(u, v, b)
            if target.is_bottom:
                return False
        return state.leq(target)

    # -- statements ---------------------------------------------------------------

    def transfer(self, body: Iterable[Stmt], state: OctValue, record: bool) -> OctValue:
        for stmt in body:
            state = self.step(stmt, state, record)
        return state

    def step(self, stmt: Stmt, state: OctValue, record: bool) -> OctValue:
        if isinstance(stmt, Assign):
            out = self.do_assign(stmt, state)
            if record:
                label = f"{stmt.name} := {stmt.expr.text if stmt.expr else '?'}"
                self.record("after", stmt.line, label, out)
            return out
        if isinstance(stmt, Havoc):
            out = state.havoc(stmt.name)
            if record:
                self.record("after", stmt.line, f"havoc {stmt.name}", out)
            return out
        if isinstance(stmt, Assume):
            out = self.apply_cond(state, stmt.cond, stmt.line)
            if record:
                self.record("after", stmt.line, f"assume {stmt.cond.text}", out)
            return out
        if isinstance(stmt, Assert):
            if record:
                proven = self.check_assert(state, stmt.cond, stmt.line)
                self.result.asserts.append(
                    AssertRecord(self.fresh_pid(), stmt.line, stmt.cond.text, proven)
                )
                self.record("after", stmt.line, f"assert {stmt.cond.text}", state)
            return state
        if isinstance(stmt, If):
            then_in = self.apply_cond(state, stmt.cond, stmt.line)
            else_in = state
            if isinstance(stmt.cond, Cond):
                negated = negate(stmt.cond)
                if negated is None:
                    self.warn(
                        stmt.line,
                        f"negation of '{stmt.cond.text}' not representable; "
                        "else branch unconstrained",
                    )
                else:
                    else_in = self.apply_cond(state, negated, stmt.line)
            then_out = self.transfer(stmt.then_body, then_in, record)
            else_out = self.transfer(stmt.else_body, else_in, record)
            out = then_out.join(else_out)
            if record:
                self.record("after", stmt.line, f"if {stmt.cond.text}", out)
            return out
        if isinstance(stmt, While):
            return self.do_while(stmt, state, record)
        raise AssertionError(f"unhandled statement {stmt!r}")

    def do_assign(self, stmt: Assign, state: OctValue) -> OctValue:
        if state.is_bottom:
            return state
        if stmt.expr is None:
            return state.assign(stmt.name, Nondet())
        shape = stmt.expr.octagonal_rhs()
        if shape is None:
            self.warn(
                stmt.line,
                f"non-octagonal assignment '{stmt.expr.text}' havocs {stmt.name}",
            )
            return state.assign(stmt.name, Nondet())
        try:
            if isinstance(shape, Fraction):
                return state.assign(stmt.name, ConstRhs(shape))
            sign, var, offset = shape
            return state.assign(stmt.name, VarRhs(var, sign < 0, offset))
        except IntegerModeError as exc:
            self.warn(stmt.line, f"{exc}; havocs {stmt.name}")
            return state.assign(stmt.name, Nondet())

    def do_while(self, stmt: While, entry: OctValue, record: bool) -> OctValue:
        """Fixpoint with delayed widening and one verified descending pass.

        The widened accumulator is not weakly closed, so loop-body transfers
        always start from the latest weakly closed candidate; stability is
        then verified on the re-closed accumulator, which both guarantees a
        genuine post-fixpoint and doubles as the descending (narrowing)
        pass.
        """
        cfg = self.cfg
        acc = entry
        nxt = entry
        head = entry
        iteration = 0
        # support shrinks at every widening, so this cannot loop forever; the
        # cap turns a logic error into a loud failure instead of a hang
        cap = cfg.max_iterations + 4 * (len(self.program.names) + 1) ** 2 + 8
        while True:
            body_in = self.apply_cond(nxt, stmt.cond, stmt.line)
            candidate = entry.join(self.transfer(stmt.body, body_in, record=False))
            if candidate.leq(acc):
                head = acc.reclosed()
                body_in = self.apply_cond(head, stmt.cond, stmt.line)
                verify = entry.join(self.transfer(stmt.body, body_in, record=False))
                if verify.leq(head):
                    head = verify
                    break
                candidate = verify
            acc = acc.widen(candidate, cfg, iteration)
            nxt = candidate
            iteration += 1
            if iteration > cap:
                raise RuntimeError("loop analysis failed to stabilize")
        if record:
            self.record("loop-head", stmt.line, f"while {stmt.cond.text}", head)
            self.transfer(stmt.body, self.apply_cond(head, stmt.cond, stmt.line), record)
        exit_state = head
        if isinstance(stmt.cond, Cond):
            negated = negate(stmt.cond)
            if negated is None:
                self.warn(
                    stmt.line,
                    f"negation of '{stmt.cond.text}' not representable; "
                    "exit unconstrained",
                )
            else:
                exit_state = self.apply_cond(head, negated, stmt.line)
        elif isinstance(stmt.cond, NonOctCond):
            self.warn(stmt.line, f"non-octagonal condition '{stmt.cond.text}' ignored")
        if record:
            self.record("exit", stmt.line, f"while {stmt.cond.text}", exit_state)
        return exit_state

    def run(self) -> AnalysisResult:
        state = OctValue.top(self.program.names, self.mode)
        self.record("entry", 0, "entry", state)
        self.transfer(self.program.body, state, record=True)
        return self.result


def analyze(
    program: Program | str,
    cfg: WidenConfig | None = None,
    mode: Mode = Mode.RATIONAL,
) -> AnalysisResult:
    if isinstance(program, str):
        program = parse_program(program)
    return Analyzer(program, cfg or WidenConfig(), mode).run()


# -- reporting ---------------------------------------------------------------------


def _interval_text(state: OctValue, name: str) -> str:
    lower, upper = bounds_of(state.var(name), state.dbm)
    left = "(-inf" if lower is None else f"[{_frac(lower)}"
    right = "+inf)" if upper == math.inf else f"{_frac(upper)}]"
    return f"{name} in {left}, {right}"


def _frac(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else str(value)


def _state_payload(state: OctValue, show_cells: bool) -> str:
    if state.is_bottom:
        return "unreachable"
    parts = [_interval_text(state, name) for name in state.names]
    text = ", ".join(parts) if parts else "top"
    if show_cells:
        cells = " | ".join(
            f"{svar_text(u, state.names)} {svar_text(v, state.names)} "
            f"{_frac(b)}"
            for u, v, b in sorted(state.dbm.items())
        )
        text += f" ; cells: {cells if cells else '(none)'}"
    return text


def report(result: AnalysisResult, show_cells: bool = False, fmt: str = "text") -> str:
    """Human- or machine-readable rendering of an analysis result."""
    if fmt not in ("text", "tsv"):
        raise ValueError(f"unknown format {fmt!r}")
    rows: list[tuple[int, str, int, str, str]] = []
    for p in result.points:
        rows.append((p.pid, p.kind, p.line, p.label, _state_payload(p.state, show_cells)))
    for a in result.asserts:
        verdict = "proven" if a.proven else "unproven"
        rows.append((a.pid, "assert", a.line, a.text, f"{verdict}: {a.text}"))
    rows.sort(key=lambda r: r[0])

    if fmt == "tsv":
        lines = [f"{pid}\t{kind}\t{payload}" for pid, kind, _, _, payload in rows]
        for warning in result.warnings:
            lines.append(f"-\twarning\t{warning}")
        return "\n".join(lines) + "\n"

    lines = [f"warning: {w}" for w in result.warnings]
    for pid, kind, line, label, payload in rows:
        if kind == "assert":
            lines.append(f"P{pid} assert line {line}: {payload}")
        elif kind == "entry":
            lines.append(f"P{pid} entry: {payload}")
        else:
            lines.append(f"P{pid} {kind} line {line} ({label}): {payload}")
    proven = sum(1 for a in result.asserts if a.proven)
    if result.asserts:
        lines.append(f"asserts: {proven}/{len(result.asserts)} proven")
    return "\n".join(lines) + "\n"
