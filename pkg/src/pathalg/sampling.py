"""Seeded random generators for property checks.

Every suite draws from its own ``random.Random`` (Mersenne Twister MT19937)
seeded with the first 8 bytes, big-endian, of
``sha256(f"{seed}:{suite}")``.  Results therefore depend only on the 64-bit
user seed and the suite name, not on the order in which suites run.

Generators keep coefficient degrees small relative to ``cap``.  Derivatives
lower degree, so a product whose intermediate degrees exceed ``cap`` can lose
terms that a different bracketing keeps; the samplers stay inside the range
where truncated arithmetic is exact.
"""
from __future__ import annotations

import hashlib
import random
from fractions import Fraction

from .coeff import MatPoly, MPoly, VectorField, monomials_up_to
from .connection import Connection, GaugeTransform
from .chen import PLPath
from .expr import Add, Bracket, Const, Gen, Mul, Neg, OpExpr, Pow, Sub, Var
from .freelie import hall_basis
from .ncdiff import AnchorFrame, NCOp
from .palg import PElem


def suite_rng(seed: int, suite: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{suite}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def rat(rng: random.Random, size: int = 3) -> Fraction:
    return Fraction(rng.randint(-size, size), rng.randint(1, size))


def nonzero_rat(rng: random.Random, size: int = 3) -> Fraction:
    while True:
        q = rat(rng, size)
        if q:
            return q


def mpoly(rng: random.Random, n: int, cap: int, deg: int, density: float = 0.5) -> MPoly:
    deg = min(deg, cap)
    terms = {e: rat(rng) for e in monomials_up_to(n, deg) if rng.random() < density}
    return MPoly(n, cap, terms)


def vector_field(rng: random.Random, n: int, cap: int, deg: int) -> VectorField:
    return VectorField(tuple(mpoly(rng, n, cap, deg) for _ in range(n)))


def linear_frame(rng: random.Random, n: int, cap: int) -> AnchorFrame:
    """Anchors with components of degree <= 1 (pushing D_i past f keeps deg f)."""
    return AnchorFrame(n, cap, tuple(vector_field(rng, n, cap, 1) for _ in range(n)))


def word(rng: random.Random, n: int, length: int) -> tuple[int, ...]:
    return tuple(rng.randint(1, n) for _ in range(length))


def ncop(rng: random.Random, frame: AnchorFrame, max_len: int, coeff_deg: int, terms: int = 3) -> NCOp:
    out = {}
    for _ in range(terms):
        w = word(rng, frame.n, rng.randint(0, max_len))
        f = mpoly(rng, frame.n, frame.cap, coeff_deg)
        out[w] = out.get(w, MPoly.zero(frame.n, frame.cap)) + f
    return NCOp(frame, out)


def pelem(rng: random.Random, frame: AnchorFrame, level: int, coeff_deg: int, terms: int = 3) -> PElem:
    out = {}
    for _ in range(terms):
        d = rng.randint(1, level)
        basis = hall_basis(frame.n, d)
        if not basis:
            continue
        h = rng.choice(basis)
        out[h] = out.get(h, MPoly.zero(frame.n, frame.cap)) + mpoly(rng, frame.n, frame.cap, coeff_deg)
    return PElem(frame, out)


def homogeneous_pelem(rng: random.Random, frame: AnchorFrame, d: int, coeff_deg: int, terms: int = 2) -> PElem:
    basis = hall_basis(frame.n, d)
    out = {}
    for _ in range(terms):
        h = rng.choice(basis)
        out[h] = out.get(h, MPoly.zero(frame.n, frame.cap)) + mpoly(rng, frame.n, frame.cap, coeff_deg)
    return PElem(frame, out)


def matpoly(rng: random.Random, N: int, n: int, cap: int, deg: int, density: float = 0.5) -> MatPoly:
    return MatPoly(tuple(tuple(mpoly(rng, n, cap, deg, density) for _ in range(N)) for _ in range(N)))


def connection(rng: random.Random, n: int, N: int, cap: int, deg: int, density: float = 0.5) -> Connection:
    return Connection(n, N, cap, tuple(matpoly(rng, N, n, cap, deg, density) for _ in range(n)))


def strictly_upper(rng: random.Random, N: int) -> list[list[Fraction]]:
    return [[rat(rng) if q > r else Fraction(0) for q in range(N)] for r in range(N)]


def nilpotent_connection(rng: random.Random, n: int, N: int, cap: int) -> Connection:
    """Constant strictly upper triangular A_i."""
    return Connection(n, N, cap, tuple(MatPoly.from_constant(strictly_upper(rng, N), n, cap) for _ in range(n)))


def restricted_gauge(rng: random.Random, n: int, N: int, cap: int, deg: int) -> GaugeTransform:
    g = MatPoly.identity(N, n, cap)
    for d in range(1, min(deg, cap) + 1):
        g = g + matpoly(rng, N, n, cap, d, 0.4).homogeneous(d)
    return GaugeTransform(g)


def point(rng: random.Random, n: int, size: int = 3) -> tuple[Fraction, ...]:
    return tuple(rat(rng, size) for _ in range(n))


def path(rng: random.Random, n: int, max_segments: int = 5, start=None) -> PLPath:
    k = rng.randint(1, max_segments)
    pts = [tuple(start) if start is not None else point(rng, n)]
    for _ in range(k):
        pts.append(point(rng, n))
    return PLPath(tuple(pts))


def opexpr(rng: random.Random, n: int, depth: int, var_budget: int) -> OpExpr:
    """Random expression whose total count of x-factors stays within ``var_budget``."""
    budget = [var_budget]

    def leaf() -> OpExpr:
        r = rng.random()
        if r < 0.4:
            return Gen(rng.randint(1, n))
        if r < 0.75 and budget[0] > 0:
            budget[0] -= 1
            return Var(rng.randint(1, n))
        return Const(rat(rng))

    def node(d: int) -> OpExpr:
        if d == 0 or rng.random() < 0.25:
            return leaf()
        kind = rng.choice(("add", "sub", "mul", "mul", "bracket", "neg", "pow"))
        if kind == "neg":
            return Neg(node(d - 1))
        if kind == "pow":
            return Pow(Gen(rng.randint(1, n)) if rng.random() < 0.7 else leaf(), rng.randint(0, 2))
        a, b = node(d - 1), node(d - 1)
        return {"add": Add, "sub": Sub, "mul": Mul, "bracket": Bracket}[kind](a, b)

    return node(depth)


def var_degree(e: OpExpr) -> int:
    """Upper bound on the polynomial degree an expression can produce."""
    if isinstance(e, Var):
        return 1
    if isinstance(e, (Const, Gen)):
        return 0
    if isinstance(e, Neg):
        return var_degree(e.arg)
    if isinstance(e, Pow):
        return e.exp * var_degree(e.base)
    if isinstance(e, (Add, Sub)):
        return max(var_degree(e.left), var_degree(e.right))
    return var_degree(e.left) + var_degree(e.right)
