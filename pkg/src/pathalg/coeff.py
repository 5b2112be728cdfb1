"""Exact coefficient kernel.

Rationals are :class:`fractions.Fraction`.  ``MPoly`` is a multivariate
polynomial over the rationals truncated by total degree: every value carries
``nvars`` and ``cap`` and silently drops monomials of total degree above
``cap``.  ``VectorField`` and ``MatPoly`` are thin tuples of ``MPoly``.

All values are immutable.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import DimensionMismatch, IndexOutOfRange, NotInvertible

Exp = tuple[int, ...]
Scalar = Union[int, Fraction]


def parse_rat(s: Union[str, int, Fraction]) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s.strip())


def fmt_rat(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def grlex_key(e: Exp) -> tuple:
    """Sort key placing the grlex-largest exponent first."""
    return (-sum(e), tuple(-x for x in e))


class MPoly:
    """Truncated polynomial in x1..xn with rational coefficients."""

    __slots__ = ("nvars", "cap", "terms", "_hash")

    def __init__(self, nvars: int, cap: int, terms: Mapping[Exp, Scalar] | None = None):
        if nvars < 0 or cap < 0:
            raise ValueError("nvars and cap must be non-negative")
        clean: dict[Exp, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise DimensionMismatch(f"exponent {e} does not fit {nvars} variables")
            if sum(e) > cap or not c:
                continue
            clean[e] = clean.get(e, Fraction(0)) + Fraction(c)
        self.nvars = nvars
        self.cap = cap
        self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, cap: int, terms: dict[Exp, Fraction]) -> MPoly:
        # terms must already be clean: no zeros, degrees within cap
        obj = cls.__new__(cls)
        obj.nvars, obj.cap, obj.terms, obj._hash = nvars, cap, terms, None
        return obj

    # constructors
    @classmethod
    def zero(cls, nvars: int, cap: int) -> MPoly:
        return cls._raw(nvars, cap, {})

    @classmethod
    def const(cls, nvars: int, cap: int, c: Scalar) -> MPoly:
        c = Fraction(c)
        return cls._raw(nvars, cap, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars: int, cap: int) -> MPoly:
        return cls.const(nvars, cap, 1)

    @classmethod
    def var(cls, i: int, nvars: int, cap: int) -> MPoly:
        if not 1 <= i <= nvars:
            raise IndexOutOfRange(f"variable x{i} out of range 1..{nvars}")
        e = tuple(1 if k == i - 1 else 0 for k in range(nvars))
        return cls(nvars, cap, {e: 1})

    @classmethod
    def monomial(cls, e: Exp, nvars: int, cap: int, c: Scalar = 1) -> MPoly:
        return cls(nvars, cap, {tuple(e): c})

    # basic queries
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.cap == other.cap and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.nvars: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.cap, frozenset(self.terms.items())))
        return self._hash

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coeff(self, e: Exp) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def sorted_terms(self) -> list[tuple[Exp, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def _check(self, other: MPoly) -> None:
        if self.nvars != other.nvars or self.cap != other.cap:
            raise DimensionMismatch(
                f"MPoly shapes differ: (nvars={self.nvars}, cap={self.cap}) vs "
                f"(nvars={other.nvars}, cap={other.cap})"
            )

    def _coerce(self, other) -> MPoly:
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(self.nvars, self.cap, other)
        raise TypeError(f"cannot combine MPoly with {type(other).__name__}")

    # arithmetic
    def __add__(self, other) -> MPoly:
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MPoly._raw(self.nvars, self.cap, out)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly._raw(self.nvars, self.cap, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> MPoly:
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MPoly:
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        return self._coerce(other) - self

    def __mul__(self, other) -> MPoly:
        if isinstance(other, (int, Fraction)):
            if not other:
                return MPoly.zero(self.nvars, self.cap)
            return MPoly._raw(self.nvars, self.cap, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        cap = self.cap
        out: dict[Exp, Fraction] = {}
        right = [(e, sum(e), c) for e, c in other.terms.items()]
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, d2, c2 in right:
                if d1 + d2 > cap:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly._raw(self.nvars, cap, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> MPoly:
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.one(self.nvars, self.cap)
        for _ in range(k):
            result = result * self
        return result

    def partial(self, i: int) -> MPoly:
        if not 1 <= i <= self.nvars:
            raise IndexOutOfRange(f"partial index {i} out of range 1..{self.nvars}")
        k = i - 1
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                e2 = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[e2] = c * e[k]
        return MPoly._raw(self.nvars, self.cap, out)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise DimensionMismatch("evaluation point has wrong length")
        pt = [Fraction(p) for p in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for p, k in zip(pt, e):
                if k:
                    term *= p ** k
            total += term
        return total

    def shift(self, point: Sequence[Scalar]) -> MPoly:
        """Return ``p(x + point)``; the degree never grows, so nothing is lost."""
        if len(point) != self.nvars:
            raise DimensionMismatch("shift vector has wrong length")
        pt = [Fraction(p) for p in point]
        out: dict[Exp, Fraction] = {}
        for e, c in self.terms.items():
            parts: dict[Exp, Fraction] = {(): c}
            for p, k in zip(pt, e):
                nxt = {}
                for pre, val in parts.items():
                    for j in range(k + 1):
                        w = comb(k, j) * p ** (k - j)
                        if w:
                            nxt[pre + (j,)] = nxt.get(pre + (j,), 0) + val * w
                parts = nxt
            for e2, v in parts.items():
                out[e2] = out.get(e2, 0) + v
        return MPoly(self.nvars, self.cap, out)

    def with_cap(self, cap: int) -> MPoly:
        return MPoly._raw(self.nvars, cap, {e: c for e, c in self.terms.items() if sum(e) <= cap})

    def truncate(self, k: int) -> MPoly:
        """Drop monomials of total degree above ``k`` (cap unchanged)."""
        return MPoly._raw(self.nvars, self.cap, {e: c for e, c in self.terms.items() if sum(e) <= k})

    def homogeneous(self, k: int) -> MPoly:
        return MPoly._raw(self.nvars, self.cap, {e: c for e, c in self.terms.items() if sum(e) == k})

    # serialization
    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "cap": self.cap,
            "terms": [{"c": fmt_rat(c), "e": list(e)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> MPoly:
        nvars, cap = int(obj["nvars"]), int(obj["cap"])
        terms: dict[Exp, Fraction] = {}
        for t in obj.get("terms", []):
            e = tuple(int(x) for x in t["e"])
            terms[e] = terms.get(e, 0) + parse_rat(t["c"])
        return cls(nvars, cap, terms)

    def __str__(self) -> str:
        return format_terms((monomial_str(e), c) for e, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"MPoly({self}; nvars={self.nvars}, cap={self.cap})"


def monomial_str(e: Exp, var: str = "x") -> str:
    parts = []
    for i, k in enumerate(e, start=1):
        if k == 1:
            parts.append(f"{var}{i}")
        elif k > 1:
            parts.append(f"{var}{i}^{k}")
    return "*".join(parts)


def format_terms(items: Iterable[tuple[str, Fraction]]) -> str:
    """Join ``(body, coefficient)`` pairs into ``a*x - b*y + c`` style text."""
    out = []
    for body, c in items:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not body:
            text = fmt_rat(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{fmt_rat(mag)}*{body}"
        if not out:
            out.append(text if sign == "+" else "-" + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out) if out else "0"


def monomials_up_to(nvars: int, deg: int) -> Iterator[Exp]:
    """All exponent vectors of total degree <= deg, grouped by degree."""
    def rec(k: int, left: int) -> Iterator[Exp]:
        if k == 1:
            yield (left,)
            return
        for j in range(left, -1, -1):
            for rest in rec(k - 1, left - j):
                yield (j,) + rest

    if nvars == 0:
        yield ()
        return
    for d in range(deg + 1):
        yield from rec(nvars, d)


def poly_arith(a: MPoly, b: MPoly, kind: str) -> MPoly:
    a._check(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown kind {kind!r}")


def partial(i: int, f: MPoly) -> MPoly:
    return f.partial(i)


@dataclass(frozen=True)
class VectorField:
    """Polynomial vector field sum_i b_i d_i."""

    components: tuple[MPoly, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise DimensionMismatch("vector field needs at least one component")
        n, cap = comps[0].nvars, comps[0].cap
        if len(comps) != n or any(c.nvars != n or c.cap != cap for c in comps):
            raise DimensionMismatch("vector field components must share nvars = len and cap")

    @property
    def nvars(self) -> int:
        return len(self.components)

    @property
    def cap(self) -> int:
        return self.components[0].cap

    @classmethod
    def coordinate(cls, i: int, nvars: int, cap: int) -> VectorField:
        if not 1 <= i <= nvars:
            raise IndexOutOfRange(f"coordinate field index {i} out of range")
        return cls(tuple(MPoly.const(nvars, cap, 1 if k == i else 0) for k in range(1, nvars + 1)))

    @classmethod
    def zero(cls, nvars: int, cap: int) -> VectorField:
        return cls(tuple(MPoly.zero(nvars, cap) for _ in range(nvars)))

    def apply(self, f: MPoly) -> MPoly:
        if f.nvars != self.nvars or f.cap != self.cap:
            raise DimensionMismatch("vector field and function shapes differ")
        out = MPoly.zero(f.nvars, f.cap)
        for i, b in enumerate(self.components, start=1):
            if b:
                d = f.partial(i)
                if d:
                    out = out + b * d
        return out

    def bracket(self, other: VectorField) -> VectorField:
        return VectorField(
            tuple(self.apply(w) - other.apply(v) for v, w in zip(self.components, other.components))
        )

    def __add__(self, other: VectorField) -> VectorField:
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: VectorField) -> VectorField:
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, f: MPoly) -> VectorField:
        return VectorField(tuple(f * c for c in self.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]

    @classmethod
    def from_json(cls, obj: Sequence) -> VectorField:
        return cls(tuple(MPoly.from_json(c) for c in obj))

    def __str__(self) -> str:
        parts = []
        for i, b in enumerate(self.components, start=1):
            if b:
                parts.append(f"d{i}" if b == 1 else f"({b})*d{i}")
        return " + ".join(parts) if parts else "0"


def vf_apply(v: VectorField, f: MPoly) -> MPoly:
    return v.apply(f)


RatMatrix = tuple[tuple[Fraction, ...], ...]


def rat_identity(n: int) -> RatMatrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def rat_matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> RatMatrix:
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0])))
        for i in range(len(a))
    )


def rat_inverse(m: Sequence[Sequence[Scalar]]) -> RatMatrix:
    """Gauss-Jordan inverse over Q."""
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise NotInvertible("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


@dataclass(frozen=True)
class MatPoly:
    """N x N matrix with MPoly entries."""

    entries: tuple[tuple[MPoly, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatch("MatPoly must be a non-empty square grid")
        nv, cap = rows[0][0].nvars, rows[0][0].cap
        if any(e.nvars != nv or e.cap != cap for r in rows for e in r):
            raise DimensionMismatch("MatPoly entries must share nvars and cap")

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def nvars(self) -> int:
        return self.entries[0][0].nvars

    @property
    def cap(self) -> int:
        return self.entries[0][0].cap

    @classmethod
    def zero(cls, dim: int, nvars: int, cap: int) -> MatPoly:
        z = MPoly.zero(nvars, cap)
        return cls(tuple(tuple(z for _ in range(dim)) for _ in range(dim)))

    @classmethod
    def identity(cls, dim: int, nvars: int, cap: int) -> MatPoly:
        return cls.from_constant(rat_identity(dim), nvars, cap)

    @classmethod
    def from_constant(cls, m: Sequence[Sequence[Scalar]], nvars: int, cap: int) -> MatPoly:
        return cls(tuple(tuple(MPoly.const(nvars, cap, x) for x in row) for row in m))

    @classmethod
    def elementary(cls, i: int, j: int, dim: int, nvars: int, cap: int) -> MatPoly:
        return cls.from_constant(
            [[int(r == i - 1 and c == j - 1) for c in range(dim)] for r in range(dim)], nvars, cap
        )

    def _check(self, other: MatPoly) -> None:
        if self.dim != other.dim or self.nvars != other.nvars or self.cap != other.cap:
            raise DimensionMismatch("MatPoly shapes differ")

    def map(self, fn) -> MatPoly:
        return MatPoly(tuple(tuple(fn(e) for e in row) for row in self.entries))

    def __add__(self, other: MatPoly) -> MatPoly:
        self._check(other)
        return MatPoly(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: MatPoly) -> MatPoly:
        self._check(other)
        return MatPoly(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __neg__(self) -> MatPoly:
        return self.map(lambda e: -e)

    def __mul__(self, other) -> MatPoly:
        if isinstance(other, (int, Fraction, MPoly)):
            return self.map(lambda e: e * other)
        self._check(other)
        n = self.dim
        zero = MPoly.zero(self.nvars, self.cap)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        return MatPoly(tuple(rows))

    def __rmul__(self, other) -> MatPoly:
        if isinstance(other, (int, Fraction, MPoly)):
            return self.map(lambda e: other * e)
        return NotImplemented

    def comm(self, other: MatPoly) -> MatPoly:
        return self * other - other * self

    def partial(self, i: int) -> MatPoly:
        return self.map(lambda e: e.partial(i))

    def is_zero(self) -> bool:
        return not any(e for row in self.entries for e in row)

    def constant(self) -> RatMatrix:
        return tuple(tuple(e.constant_term() for e in row) for row in self.entries)

    def evaluate(self, point: Sequence[Scalar]) -> RatMatrix:
        return tuple(tuple(e.evaluate(point) for e in row) for row in self.entries)

    def shift(self, point: Sequence[Scalar]) -> MatPoly:
        return self.map(lambda e: e.shift(point))

    def with_cap(self, cap: int) -> MatPoly:
        return self.map(lambda e: e.with_cap(cap))

    def truncate(self, k: int) -> MatPoly:
        return self.map(lambda e: e.truncate(k))

    def homogeneous(self, k: int) -> MatPoly:
        return self.map(lambda e: e.homogeneous(k))

    def degree(self) -> int:
        return max(e.degree() for row in self.entries for e in row)

    def inverse(self) -> MatPoly:
        """Power-series inverse modulo degree > cap; needs an invertible constant term."""
        g0inv = MatPoly.from_constant(rat_inverse(self.constant()), self.nvars, self.cap)
        ident = MatPoly.identity(self.dim, self.nvars, self.cap)
        nil = ident - g0inv * self  # no constant term
        result = ident
        power = ident
        for _ in range(self.cap):
            power = power * nil
            if power.is_zero():
                break
            result = result + power
        return result * g0inv

    def to_json(self) -> list:
        return [[e.to_json() for e in row] for row in self.entries]

    @classmethod
    def from_json(cls, obj: Sequence) -> MatPoly:
        return cls(tuple(tuple(MPoly.from_json(e) for e in row) for row in obj))

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(e) for e in row) for row in self.entries) + "]"


def mat_arith(a: MatPoly, b: MatPoly, kind: str) -> MatPoly:
    a._check(b)
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "comm":
        return a.comm(b)
    raise ValueError(f"unknown kind {kind!r}")


def rat_matrix_json(m: Sequence[Sequence[Fraction]]) -> list:
    return [[fmt_rat(x) for x in row] for row in m]


def rat_matrix_from_json(obj: Sequence[Sequence]) -> RatMatrix:
    return tuple(tuple(parse_rat(x) for x in row) for row in obj)
