"""Chen series of piecewise-linear paths and parallel transport.

Orientation: the series of a path ``gamma`` from ``x`` to ``y`` stores the
iterated integrals of the reversed path (from ``y`` back to ``x``), with
coordinates centered at ``y``.  With that choice the pairing
``a -> sum_w I_w (d_w a)(y)`` is evaluation at the start point ``x``, and the
series of ``gamma`` followed by ``delta`` is ``I(delta) * I(gamma)`` under the
deconcatenation product.

Transport of ``nabla = d + A`` along ``gamma`` is the matrix
``T = sum_w I_w [(d - A)_w1 ... (d - A)_wp 1](y)``.  For constant ``A`` this is
``sum_w v_w A_w / p!`` on a segment, i.e. ``exp(v . A)``, and for a composite
path ``T(gamma delta) = T(delta) T(gamma)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Mapping, Sequence

from .coeff import MatPoly, MPoly, RatMatrix, fmt_rat, parse_rat, rat_identity, rat_matmul
from .connection import Connection
from .errors import DimensionMismatch, EndpointMismatch
from .ncdiff import AnchorFrame, NCOp, coproduct, tensor_square

Word = tuple[int, ...]
Point = tuple[Fraction, ...]
Integrals = dict[Word, Fraction]


@dataclass(frozen=True)
class PLPath:
    points: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple(tuple(parse_rat(x) for x in p) for p in self.points)
        if len(pts) < 2:
            raise DimensionMismatch("a path needs at least two points")
        if len({len(p) for p in pts}) != 1 or not pts[0]:
            raise DimensionMismatch("path points must share a positive dimension")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points[0])

    @property
    def start(self) -> Point:
        return self.points[0]

    @property
    def end(self) -> Point:
        return self.points[-1]

    def segments(self) -> list[Point]:
        return [tuple(b - a for a, b in zip(p, q)) for p, q in zip(self.points, self.points[1:])]

    def then(self, other: PLPath) -> PLPath:
        """This path followed by ``other``."""
        if other.start != self.end:
            raise EndpointMismatch(f"path ends at {self.end} but the next one starts at {other.start}")
        return PLPath(self.points + other.points[1:])

    def reversed(self) -> PLPath:
        return PLPath(self.points[::-1])

    def subdivide(self, seg: int, t: Fraction) -> PLPath:
        """Insert the point at parameter t of segment ``seg``."""
        p, q = self.points[seg], self.points[seg + 1]
        mid = tuple(a + Fraction(t) * (b - a) for a, b in zip(p, q))
        return PLPath(self.points[: seg + 1] + (mid,) + self.points[seg + 1 :])

    def to_json(self) -> dict:
        return {"n": self.n, "points": [[fmt_rat(x) for x in p] for p in self.points]}

    @classmethod
    def from_json(cls, obj: Mapping) -> PLPath:
        path = cls(tuple(tuple(parse_rat(x) for x in p) for p in obj["points"]))
        if "n" in obj and int(obj["n"]) != path.n:
            raise DimensionMismatch(f"declared n={obj['n']} but points have dimension {path.n}")
        return path


def all_words(n: int, cap: int):
    for p in range(cap + 1):
        yield from product(range(1, n + 1), repeat=p)


def seg_integrals(v: Sequence, cap: int) -> Integrals:
    """Iterated integrals of a straight segment with displacement v."""
    v = [parse_rat(x) for x in v]
    out: Integrals = {(): Fraction(1)}
    for w in all_words(len(v), cap):
        if not w:
            continue
        val = Fraction(1)
        for i in w:
            val *= v[i - 1]
            if not val:
                break
        if val:
            out[w] = val / factorial(len(w))
    return out


def concat_integrals(first: Mapping[Word, Fraction], second: Mapping[Word, Fraction], cap: int) -> Integrals:
    """(I * J)_w = sum over w = uv of I_u J_v, for I then J."""
    out: Integrals = {}
    for u, a in first.items():
        for v, b in second.items():
            if len(u) + len(v) <= cap:
                w = u + v
                out[w] = out.get(w, 0) + a * b
    return {w: c for w, c in out.items() if c}


class ChenSeries:
    __slots__ = ("n", "cap", "target", "integrals")

    def __init__(self, n: int, cap: int, target: Sequence, integrals: Mapping[Word, Fraction]):
        self.n, self.cap = n, cap
        self.target = tuple(parse_rat(x) for x in target)
        if len(self.target) != n:
            raise DimensionMismatch("target point has the wrong dimension")
        clean = {}
        for w, c in integrals.items():
            w = tuple(w)
            if len(w) > cap:
                continue
            if any(not 1 <= i <= n for i in w):
                raise DimensionMismatch(f"word {w} uses letters outside 1..{n}")
            c = parse_rat(c)
            if c:
                clean[w] = c
        self.integrals = clean

    @classmethod
    def identity(cls, n: int, cap: int, point: Sequence) -> ChenSeries:
        return cls(n, cap, point, {(): 1})

    def __getitem__(self, w: Sequence[int]) -> Fraction:
        return self.integrals.get(tuple(w), Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChenSeries):
            return NotImplemented
        return (self.n, self.cap, self.target, self.integrals) == (other.n, other.cap, other.target, other.integrals)

    def with_value(self, w: Sequence[int], c) -> ChenSeries:
        vals = dict(self.integrals)
        vals[tuple(w)] = parse_rat(c)
        return ChenSeries(self.n, self.cap, self.target, vals)

    def sorted_terms(self):
        return sorted(self.integrals.items(), key=lambda t: (len(t[0]), t[0]))

    def as_ncop(self) -> NCOp:
        """sum_w I_w D_w with constant coefficients."""
        frame = AnchorFrame.coordinate(self.n, self.cap)
        return NCOp(frame, {w: MPoly.const(self.n, self.cap, c) for w, c in self.integrals.items()})

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "cap": self.cap,
            "target": [fmt_rat(x) for x in self.target],
            "terms": [{"w": list(w), "c": fmt_rat(c)} for w, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> ChenSeries:
        return cls(int(obj["n"]), int(obj["cap"]), obj["target"], {tuple(t["w"]): t["c"] for t in obj["terms"]})

    def __str__(self) -> str:
        lines = [f"target ({', '.join(fmt_rat(x) for x in self.target)})"]
        for w, c in self.sorted_terms():
            lines.append(f"I[{','.join(map(str, w))}] = {fmt_rat(c)}")
        return "\n".join(lines)


def chen_series(path: PLPath, cap: int) -> ChenSeries:
    if cap < 1:
        raise ValueError("cap must be at least 1")
    acc: Integrals = {(): Fraction(1)}
    # reversed path: walk the segments backwards with negated displacements
    for v in reversed(path.segments()):
        acc = concat_integrals(acc, seg_integrals([-x for x in v], cap), cap)
    return ChenSeries(path.n, cap, path.end, acc)


def shuffle(u: Word, v: Word) -> dict[Word, int]:
    """Shuffle product of two words with multiplicities."""
    out: dict[Word, int] = {}
    total = len(u) + len(v)
    for pos in combinations(range(total), len(u)):
        pset = set(pos)
        it_u, it_v = iter(u), iter(v)
        w = tuple(next(it_u) if k in pset else next(it_v) for k in range(total))
        out[w] = out.get(w, 0) + 1
    return out


def shuffle_check(e: ChenSeries) -> bool:
    """I_u I_v = sum over shuffles for all |u| + |v| <= cap."""
    words = list(all_words(e.n, e.cap))
    for u in words:
        for v in words:
            if len(u) + len(v) > e.cap:
                continue
            lhs = sum((e[w] * m for w, m in shuffle(u, v).items()), Fraction(0))
            if lhs != e[u] * e[v]:
                return False
    return True


def grouplike_check(e: ChenSeries) -> bool:
    """Delta(E) = E (x) E through the operator coproduct, plus counit 1."""
    if e[()] != 1:
        return False
    op = e.as_ncop()
    lhs = coproduct(op).terms
    rhs = {k: f for k, f in tensor_square(op).terms.items() if len(k[0]) + len(k[1]) <= e.cap}
    return lhs == rhs


def source_eval(e: ChenSeries, a: MPoly) -> Fraction:
    """sum_w I_w (d_w a)(target); equals a at the start of the path."""
    if a.nvars != e.n:
        raise DimensionMismatch("polynomial and series have different n")
    if a.degree() > e.cap:
        raise DimensionMismatch(f"degree {a.degree()} exceeds the series cap {e.cap}")
    memo: dict[Word, MPoly] = {(): a}

    def deriv(w: Word) -> MPoly:
        if w not in memo:
            memo[w] = deriv(w[1:]).partial(w[0])
        return memo[w]

    total = Fraction(0)
    for w, c in e.integrals.items():
        d = deriv(w)
        if d:
            total += c * d.evaluate(e.target)
    return total


def start_point(e: ChenSeries) -> Point:
    if e.cap < 1:
        return e.target
    return tuple(source_eval(e, MPoly.var(i, e.n, e.cap)) for i in range(1, e.n + 1))


def compose(later: ChenSeries, earlier: ChenSeries) -> ChenSeries:
    """Series of ``earlier`` followed by ``later``."""
    if later.n != earlier.n:
        raise DimensionMismatch("series have different n")
    if earlier.target != start_point(later):
        raise EndpointMismatch(
            f"first path ends at {tuple(map(fmt_rat, earlier.target))}, second starts at {tuple(map(fmt_rat, start_point(later)))}"
        )
    cap = min(later.cap, earlier.cap)
    return ChenSeries(later.n, cap, later.target, concat_integrals(later.integrals, earlier.integrals, cap))


def _check_conn(n: int, c: Connection) -> None:
    if n != c.n:
        raise DimensionMismatch(f"path dimension {n} differs from connection n={c.n}")


def transport(e: ChenSeries, c: Connection) -> RatMatrix:
    _check_conn(e.n, c)
    # re-center at the target; only degrees <= cap can reach a value at 0
    work = max(e.cap, 0)
    A = [a.with_cap(max(work, c.cap)).shift(e.target).with_cap(work) for a in c.A]
    one = MatPoly.identity(c.N, c.n, work)
    memo: dict[Word, MatPoly] = {(): one}

    def op(w: Word) -> MatPoly:
        if w not in memo:
            inner = op(w[1:])
            memo[w] = inner.partial(w[0]) - A[w[0] - 1] * inner
        return memo[w]

    total = [[Fraction(0)] * c.N for _ in range(c.N)]
    for w, coeff in e.integrals.items():
        m = op(w).constant()
        for r in range(c.N):
            for q in range(c.N):
                total[r][q] += coeff * m[r][q]
    return tuple(tuple(row) for row in total)


# Picard oracle


def _t_integrate(f: MPoly) -> MPoly:
    """Antiderivative in t vanishing at 0 for a one-variable polynomial."""
    return MPoly(1, f.cap, {(k + 1,): c / (k + 1) for (k,), c in f.terms.items()})


def _graded_mul(a: list[MatPoly | RatMatrix], b: list, cap: int, mul) -> list:
    out = [None] * (cap + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= cap and x is not None and y is not None:
                z = mul(x, y)
                out[i + j] = z if out[i + j] is None else _mat_add(out[i + j], z)
    return out


def _mat_add(x: RatMatrix, y: RatMatrix) -> RatMatrix:
    return tuple(tuple(p + q for p, q in zip(r, s)) for r, s in zip(x, y))


def picard_orders(path: PLPath, c: Connection, cap: int) -> list[RatMatrix]:
    """Transport split by order in the path scale (scaling about the endpoint).

    Each segment solves Phi' = Omega(t) Phi by Picard iteration, where
    Omega = sum_i v_i A_i(y + z(t)) with z(t) = p - y + t v; the term of A of
    degree k contributes at order k + 1.  Segment results are multiplied with
    the later segment on the left.
    """
    _check_conn(path.n, c)
    n, N = path.n, c.N
    y = path.end
    tcap = cap
    A = [a.with_cap(max(cap, c.cap)).shift(y) for a in c.A]
    zero = tuple(tuple(Fraction(0) for _ in range(N)) for _ in range(N))
    ident = rat_identity(N)
    total: list = [ident] + [None] * cap
    for p, v in zip(path.points, path.segments()):
        # z(t) components as polynomials in t
        z = [MPoly(1, tcap, {(0,): pi - yi, (1,): vi}) for pi, yi, vi in zip(p, y, v)]
        omega: list[MatPoly | None] = [None] * (cap + 1)
        for k in range(1, cap + 1):
            acc = None
            for i in range(n):
                if not v[i]:
                    continue
                for r in range(N):
                    for q in range(N):
                        for e, coeff in A[i].entries[r][q].terms.items():
                            if sum(e) != k - 1:
                                continue
                            term = MPoly.const(1, tcap, coeff * v[i])
                            for zj, ej in zip(z, e):
                                if ej:
                                    term = term * zj**ej
                            if acc is None:
                                acc = [[MPoly.zero(1, tcap) for _ in range(N)] for _ in range(N)]
                            acc[r][q] = acc[r][q] + term
            if acc is not None:
                omega[k] = MatPoly(tuple(tuple(row) for row in acc))
        phi: list[MatPoly | None] = [MatPoly.identity(N, 1, tcap)] + [None] * cap
        for m in range(1, cap + 1):
            acc = None
            for k in range(1, m + 1):
                if omega[k] is not None and phi[m - k] is not None:
                    term = omega[k] * phi[m - k]
                    acc = term if acc is None else acc + term
            if acc is not None:
                integ = acc.map(_t_integrate)
                phi[m] = None if integ.is_zero() else integ
        seg = [None if f is None else f.evaluate((1,)) for f in phi]
        total = _graded_mul(seg, total, cap, rat_matmul)
    return [zero if m is None else m for m in total]


def picard_transport(path: PLPath, c: Connection, cap: int) -> RatMatrix:
    orders = picard_orders(path, c, cap)
    out = orders[0]
    for m in orders[1:]:
        out = _mat_add(out, m)
    return out


def matrix_exp_nilpotent(m: Sequence[Sequence[Fraction]]) -> RatMatrix:
    """exp(m) for a nilpotent rational matrix (finite sum)."""
    N = len(m)
    out = rat_identity(N)
    power = rat_identity(N)
    for k in range(1, N + 1):
        power = tuple(tuple(x / k for x in row) for row in rat_matmul(power, m))
        if not any(x for row in power for x in row):
            return out
        out = _mat_add(out, power)
    if any(x for row in rat_matmul(power, m) for x in row):
        raise ValueError("matrix is not nilpotent")
    return out


def segment_exponentials(path: PLPath, A: Sequence[Sequence[Sequence[Fraction]]]) -> RatMatrix:
    """Ordered product of exp(v . A) over segments, later ones on the left (constant A)."""
    N = len(A[0])
    out = rat_identity(N)
    for v in path.segments():
        m = [[sum((vi * a[r][q] for vi, a in zip(v, A)), Fraction(0)) for q in range(N)] for r in range(N)]
        out = rat_matmul(matrix_exp_nilpotent(m), out)
    return out

