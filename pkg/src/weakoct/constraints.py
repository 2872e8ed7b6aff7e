"""The octagonal constraint text format shared by all command-line tools.

The format is UTF-8 and line oriented::

    # comment
    vars x y z
    +x +x <= 1
    -y -y <= 3
    +y +z <= 1

The optional ``vars`` header fixes variable order; without it, variables are
numbered in order of first appearance.  Each constraint line is

    <±ident> [<±ident>] <= <rational>

with the rational written ``p``, ``-p`` or ``p/q``.  A single-term line
``+x <= c`` bounds the variable itself and is stored in doubled form
(x+ - x- <= 2c); a two-term line bounds the sum/difference of the terms, so
``+x +x <= c`` means 2x <= c and its constant is *not* doubled.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import Constraint, ParseError, bar, neg, pos

_RATIONAL_RE = re.compile(r"^-?\d+(?:/\d+)?$")
_TERM_RE = re.compile(r"^([+-])([A-Za-z_]\w*)$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``-p`` or ``p/q`` (decimal notation is rejected)."""
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"malformed rational {text!r}")
    return Fraction(text)


def _signed(name_id: int, sign: str) -> int:
    return pos(name_id) if sign == "+" else neg(name_id)


def constraint_of_terms(
    first: tuple[str, int], second: tuple[str, int] | None, bound: Fraction
) -> Constraint:
    """Signed-form constraint for one or two ±variable terms summing <= bound.

    One term doubles the constant (±x <= c becomes ±2x <= 2c); two terms map
    s1*x + s2*y <= c onto u - v <= c with u = x^s1 and v = bar(y^s2).
    """
    s1, x = first
    u = _signed(x, s1)
    if second is None:
        return Constraint(u, bar(u), 2 * bound)
    s2, y = second
    return Constraint(u, bar(_signed(y, s2)), bound)


def parse_constraints(text: str) -> tuple[list[Constraint], tuple[str, ...]]:
    """Parse a constraint file into signed constraints plus the name table."""
    names: list[str] = []
    index: dict[str, int] = {}
    declared = False
    constraints: list[Constraint] = []

    def lookup(name: str, lineno: int) -> int:
        if name in index:
            return index[name]
        if declared:
            raise ParseError(f"undeclared variable {name!r}", lineno)
        index[name] = len(names)
        names.append(name)
        return index[name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "vars":
            if declared or constraints:
                raise ParseError("misplaced 'vars' header", lineno)
            declared = True
            for name in tokens[1:]:
                if not re.match(r"^[A-Za-z_]\w*$", name):
                    raise ParseError(f"bad variable name {name!r}", lineno)
                if name in index:
                    raise ParseError(f"duplicate variable {name!r}", lineno)
                index[name] = len(names)
                names.append(name)
            continue
        if "<=" not in tokens:
            raise ParseError("expected '<='", lineno)
        at = tokens.index("<=")
        terms, rhs = tokens[:at], tokens[at + 1 :]
        if len(rhs) != 1 or not (1 <= len(terms) <= 2):
            raise ParseError("expected '<±var> [<±var>] <= <rational>'", lineno)
        try:
            bound = parse_rational(rhs[0])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        parsed_terms = []
        for term in terms:
            m = _TERM_RE.match(term)
            if not m:
                raise ParseError(f"malformed term {term!r}", lineno)
            parsed_terms.append((m.group(1), lookup(m.group(2), lineno)))
        first = parsed_terms[0]
        second = parsed_terms[1] if len(parsed_terms) == 2 else None
        constraints.append(constraint_of_terms(first, second, bound))
    return constraints, tuple(names)


def format_constraints(cs: list[Constraint], names: tuple[str, ...]) -> str:
    """Inverse of :func:`parse_constraints` on the constraint list."""
    lines = ["vars " + " ".join(names)] if names else []
    for u, v, bound in cs:
        s1 = "-" if u & 1 else "+"
        x = names[u >> 1]
        # the second printed term is the bar of v, by the parse mapping
        w = bar(v)
        s2 = "-" if w & 1 else "+"
        y = names[w >> 1]
        b = str(bound.numerator) if bound.denominator == 1 else str(bound)
        lines.append(f"{s1}{x} {s2}{y} <= {b}")
    return "\n".join(lines) + "\n"
