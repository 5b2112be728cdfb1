"""Operator expression trees (input syntax for normal-form computations)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .coeff import fmt_rat


@dataclass(frozen=True)
class Const:
    value: Fraction
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Var:
    index: int
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Gen:
    index: int
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Add:
    left: "OpExpr"
    right: "OpExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Sub:
    left: "OpExpr"
    right: "OpExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Neg:
    arg: "OpExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Mul:
    left: "OpExpr"
    right: "OpExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Bracket:
    left: "OpExpr"
    right: "OpExpr"
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Pow:
    base: "OpExpr"
    exp: int
    pos: tuple[int, int] | None = field(default=None, compare=False)


OpExpr = Union[Const, Var, Gen, Add, Sub, Neg, Mul, Bracket, Pow]


def max_indices(e: OpExpr) -> tuple[int, int]:
    """Largest variable index and largest generator index used in ``e``."""
    if isinstance(e, Const):
        return 0, 0
    if isinstance(e, Var):
        return e.index, 0
    if isinstance(e, Gen):
        return 0, e.index
    if isinstance(e, (Neg,)):
        return max_indices(e.arg)
    if isinstance(e, Pow):
        return max_indices(e.base)
    a, b = max_indices(e.left), max_indices(e.right)
    return max(a[0], b[0]), max(a[1], b[1])


def format_expr(e: OpExpr) -> str:
    """Fully parenthesized text that parses back to an equal tree."""
    if isinstance(e, Const):
        v = Fraction(e.value)
        return fmt_rat(v) if v >= 0 else f"(-{fmt_rat(-v)})"
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Gen):
        return f"D{e.index}"
    if isinstance(e, Neg):
        return f"(-{format_expr(e.arg)})"
    if isinstance(e, Add):
        return f"({format_expr(e.left)} + {format_expr(e.right)})"
    if isinstance(e, Sub):
        return f"({format_expr(e.left)} - {format_expr(e.right)})"
    if isinstance(e, Mul):
        return f"{_factor(e.left)}*{_factor(e.right)}"
    if isinstance(e, Bracket):
        return f"[{format_expr(e.left)}, {format_expr(e.right)}]"
    if isinstance(e, Pow):
        return f"{_atom(e.base)}^{e.exp}"
    raise TypeError(f"not an expression: {e!r}")


def _factor(e: OpExpr) -> str:
    s = format_expr(e)
    return s if not isinstance(e, Mul) else f"({s})"


def _atom(e: OpExpr) -> str:
    s = format_expr(e)
    if isinstance(e, (Var, Gen, Bracket)) or (isinstance(e, Const) and e.value >= 0 and Fraction(e.value).denominator == 1):
        return s
    if isinstance(e, (Add, Sub, Neg)) or (isinstance(e, Const) and e.value < 0):
        return s  # already parenthesized
    return f"({s})"
