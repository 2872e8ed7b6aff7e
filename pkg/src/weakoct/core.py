"""Exact bound arithmetic, signed variables and environments.

Octagonal constraints (±x ± y <= c, ±2x <= c) are all encoded as difference
constraints u - v <= c over *signed variables*: program variable number i
contributes a positive occurrence with code 2*i and a negative occurrence
with code 2*i + 1, and flipping the sign of a signed variable is XOR-ing the
lowest bit of its code.

Bounds are exact rationals extended with +infinity.  There is no -infinity
and bounds are never subtracted, so ``math.inf`` serves as the absorbing
infinite element: comparisons between ``Fraction`` and ``math.inf`` are
exact, and any sum involving it is again ``math.inf``.  No finite float is
ever constructed, so exactness is preserved throughout.
"""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from typing import Mapping, NamedTuple, Union

INF = math.inf

# A DBM cell / constraint bound: an exact rational, or INF for "unconstrained".
Bound = Union[Fraction, float]

ZERO = Fraction(0)


class Mode(Enum):
    """Value universe of the analyzed variables."""

    RATIONAL = "rational"
    INTEGER = "integer"


class _Empty:
    """Distinguished result of operations whose output describes no state.

    Satisfiable matrices are never represented in-band as "empty"; operations
    that can discover unsatisfiability return this singleton instead.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY"


EMPTY = _Empty()


class ParseError(ValueError):
    """Syntax or semantic error in textual input, with a 1-based line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class IntegerModeError(ValueError):
    """Non-integral bound fed to an integer-mode operation."""


def is_finite(b: Bound) -> bool:
    return b != INF


def is_integral(b: Bound) -> bool:
    """True for finite bounds with denominator 1 (and for INF)."""
    if b == INF:
        return True
    return b.denominator == 1


def bound_add(a: Bound, b: Bound) -> Bound:
    """Exact sum of two bounds; INF absorbs."""
    if a == INF or b == INF:
        return INF
    return a + b


def bound_half(a: Bound) -> Bound:
    """Exact a/2; INF/2 = INF."""
    if a == INF:
        return INF
    return a / 2


# -- signed variables ---------------------------------------------------------


def pos(var: int) -> int:
    """Signed-variable code of the positive occurrence of variable ``var``."""
    return 2 * var


def neg(var: int) -> int:
    """Signed-variable code of the negative occurrence of variable ``var``."""
    return 2 * var + 1


def bar(u: int) -> int:
    """Opposite occurrence of a signed variable (an involution)."""
    return u ^ 1


def var_of(u: int) -> int:
    """Program variable a signed variable refers to."""
    return u >> 1


def is_negative(u: int) -> bool:
    return bool(u & 1)


def svar_text(u: int, names: tuple[str, ...]) -> str:
    """Render a signed variable as ``+name`` / ``-name``."""
    sign = "-" if u & 1 else "+"
    return sign + names[u >> 1]


def eval_signed(env: Mapping[int, Fraction], u: int) -> Fraction:
    """Value of a signed variable in a regular environment.

    Regular environments store only the positive occurrences; the negative
    occurrence always evaluates to the opposite value and is never stored.
    """
    var = u >> 1
    if var not in env:
        raise KeyError(f"unknown variable index {var}")
    value = env[var]
    return -value if u & 1 else value


class Constraint(NamedTuple):
    """One octagonal constraint in signed difference form: u - v <= bound."""

    u: int
    v: int
    bound: Fraction


def format_bound(b: Bound) -> str:
    if b == INF:
        return "inf"
    if b.denominator == 1:
        return str(b.numerator)
    return f"{b.numerator}/{b.denominator}"
