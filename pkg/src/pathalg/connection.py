"""Matrix connections nabla_i = d_i + A_i on the formal disk at 0.

Curvature is the commutator ``F_ij = [nabla_i, nabla_j] = d_i A_j - d_j A_i
+ [A_i, A_j]`` and the covariant derivative acts on endomorphisms by
``d_i M + [A_i, M]``.  Jets are the values at 0 of
``nabla_i1 ... nabla_i(d-2) F_i(d-1),id`` for the generator index pattern of
:mod:`pathalg.homology`; they classify connections up to gauge
transformations equal to 1 at the origin.

Precision: entries are polynomials truncated at ``cap``.  A connection built
from exact polynomials gives exact jets up to order ``cap + 2``; one that is
itself a truncated series (output of a gauge change) is exact up to order
``cap + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Mapping, Sequence, Union

from .coeff import (
    MatPoly,
    MPoly,
    RatMatrix,
    monomials_up_to,
    rat_identity,
    rat_matrix_from_json,
    rat_matrix_json,
)
from .errors import CapTooSmall, DimensionMismatch, IndexOutOfRange, NotInvertible
from .homology import GenSeq, generators, is_gen_seq
from .linalg import solve
from .ncdiff import NCOp
from .palg import PElem, p_to_nc

Exp = tuple[int, ...]


@dataclass(frozen=True)
class Connection:
    n: int
    N: int
    cap: int
    A: tuple[MatPoly, ...]

    def __post_init__(self):
        A = tuple(self.A)
        object.__setattr__(self, "A", A)
        if len(A) != self.n:
            raise DimensionMismatch(f"need {self.n} connection matrices, got {len(A)}")
        for a in A:
            if a.dim != self.N or a.nvars != self.n or a.cap != self.cap:
                raise DimensionMismatch("connection matrices must share n, N and cap")

    @classmethod
    def zero(cls, n: int, N: int, cap: int) -> Connection:
        return cls(n, N, cap, tuple(MatPoly.zero(N, n, cap) for _ in range(n)))

    def with_cap(self, cap: int) -> Connection:
        return Connection(self.n, self.N, cap, tuple(a.with_cap(cap) for a in self.A))

    def to_json(self) -> dict:
        return {"n": self.n, "N": self.N, "cap": self.cap, "A": [a.to_json() for a in self.A]}

    @classmethod
    def from_json(cls, obj: Mapping) -> Connection:
        return cls(int(obj["n"]), int(obj["N"]), int(obj["cap"]), tuple(MatPoly.from_json(a) for a in obj["A"]))

    def radial_residual(self) -> MatPoly:
        """sum_i x_i A_i (zero exactly in radial gauge)."""
        out = MatPoly.zero(self.N, self.n, self.cap)
        for i, a in enumerate(self.A, start=1):
            out = out + a * MPoly.var(i, self.n, self.cap)
        return out


@dataclass(frozen=True)
class GaugeTransform:
    g: MatPoly

    def __post_init__(self):
        try:
            self.g.inverse()
        except NotInvertible:
            raise NotInvertible("gauge transformation has a singular constant term") from None

    @property
    def restricted(self) -> bool:
        return self.g.constant() == rat_identity(self.g.dim)

    def to_json(self) -> list:
        return self.g.to_json()


@dataclass(frozen=True)
class JetData:
    n: int
    N: int
    Dmax: int
    values: tuple[tuple[GenSeq, RatMatrix], ...]

    def __post_init__(self):
        vals = tuple(sorted(((tuple(k), tuple(tuple(Fraction(x) for x in r) for r in m)) for k, m in dict(self.values).items()), key=lambda t: (len(t[0]), t[0])))
        for seq, m in vals:
            if not is_gen_seq(seq, self.n) or len(seq) > self.Dmax:
                raise DimensionMismatch(f"jet key {seq} violates the index pattern")
            if len(m) != self.N or any(len(r) != self.N for r in m):
                raise DimensionMismatch(f"jet value for {seq} is not {self.N}x{self.N}")
        object.__setattr__(self, "values", vals)

    def as_dict(self) -> dict[GenSeq, RatMatrix]:
        return dict(self.values)

    def is_zero(self) -> bool:
        return all(not any(x for r in m for x in r) for _, m in self.values)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "N": self.N,
            "Dmax": self.Dmax,
            "values": [{"seq": list(k), "m": rat_matrix_json(m)} for k, m in self.values],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> JetData:
        vals = tuple((tuple(v["seq"]), rat_matrix_from_json(v["m"])) for v in obj["values"])
        return cls(int(obj["n"]), int(obj["N"]), int(obj["Dmax"]), vals)


def _check_index(c: Connection, *idx: int) -> None:
    for i in idx:
        if not 1 <= i <= c.n:
            raise IndexOutOfRange(f"index {i} out of range 1..{c.n}")


def curvature(c: Connection, i: int, j: int) -> MatPoly:
    _check_index(c, i, j)
    ai, aj = c.A[i - 1], c.A[j - 1]
    return aj.partial(i) - ai.partial(j) + ai.comm(aj)


def cov_deriv(c: Connection, i: int, m: MatPoly) -> MatPoly:
    _check_index(c, i)
    if m.dim != c.N or m.nvars != c.n or m.cap != c.cap:
        raise DimensionMismatch("matrix shape does not match connection")
    return m.partial(i) + c.A[i - 1].comm(m)


def _jet_polys(c: Connection, seqs: Sequence[GenSeq]) -> dict[GenSeq, MatPoly]:
    memo: dict[GenSeq, MatPoly] = {}

    def value(seq: GenSeq) -> MatPoly:
        if seq not in memo:
            if len(seq) == 2:
                memo[seq] = curvature(c, seq[0], seq[1])
            else:
                memo[seq] = cov_deriv(c, seq[0], value(seq[1:]))
        return memo[seq]

    return {s: value(s) for s in seqs}


def jets(c: Connection, dmax: int) -> JetData:
    if dmax < 2:
        raise ValueError("Dmax must be at least 2")
    if dmax > c.cap + 2:
        raise CapTooSmall(f"Dmax={dmax} needs cap >= {dmax - 2}, connection has cap {c.cap}")
    seqs = [s for d in range(2, dmax + 1) for s in generators(c.n, d)]
    polys = _jet_polys(c, seqs)
    return JetData(c.n, c.N, dmax, tuple((s, polys[s].constant()) for s in seqs))


def bianchi_residuals(c: Connection, curv: Mapping[tuple[int, int], MatPoly]) -> dict[tuple[int, int, int], MatPoly]:
    """nabla_i F_jk + nabla_j F_ki + nabla_k F_ij for all i < j < k."""

    def F(a: int, b: int) -> MatPoly:
        if (a, b) in curv:
            return curv[(a, b)]
        return -curv[(b, a)]

    out = {}
    for i in range(1, c.n + 1):
        for j in range(i + 1, c.n + 1):
            for k in range(j + 1, c.n + 1):
                out[(i, j, k)] = cov_deriv(c, i, F(j, k)) + cov_deriv(c, j, F(k, i)) + cov_deriv(c, k, F(i, j))
    return out


def bianchi_check(c: Connection, curv: Mapping[tuple[int, int], MatPoly] | None = None) -> bool:
    """Cyclic Bianchi sum vanishes.

    Without ``curv`` the connection is lifted one order so the check is exact
    through degree ``cap``.  A supplied curvature table (for instance a
    perturbed one) is compared through degree ``cap - 1``, the range where a
    single derivative of a cap-truncated matrix is exact.
    """
    if curv is None:
        lifted = c.with_cap(c.cap + 1)
        table = {(i, j): curvature(lifted, i, j) for i in range(1, c.n + 1) for j in range(i + 1, c.n + 1)}
        res = bianchi_residuals(lifted, table)
        keep = c.cap
    else:
        res = bianchi_residuals(c, curv)
        keep = c.cap - 1
    return all(r.truncate(keep).is_zero() for r in res.values())


# matrix differential operators


class MatDiffOp:
    """sum_alpha M_alpha(x) d^alpha with commuting partials and MatPoly coefficients."""

    __slots__ = ("n", "N", "cap", "terms")

    def __init__(self, n: int, N: int, cap: int, terms: Mapping[Exp, MatPoly] | None = None):
        self.n, self.N, self.cap = n, N, cap
        self.terms = {tuple(a): m for a, m in (terms or {}).items() if not m.is_zero()}

    @classmethod
    def identity(cls, n: int, N: int, cap: int) -> MatDiffOp:
        return cls(n, N, cap, {(0,) * n: MatPoly.identity(N, n, cap)})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MatDiffOp) and self.terms == other.terms

    def __add__(self, other: MatDiffOp) -> MatDiffOp:
        out = dict(self.terms)
        for a, m in other.terms.items():
            out[a] = out[a] + m if a in out else m
        return MatDiffOp(self.n, self.N, self.cap, out)

    def __neg__(self) -> MatDiffOp:
        return MatDiffOp(self.n, self.N, self.cap, {a: -m for a, m in self.terms.items()})

    def __sub__(self, other: MatDiffOp) -> MatDiffOp:
        return self + (-other)

    def lmul(self, m: Union[MatPoly, MPoly]) -> MatDiffOp:
        return MatDiffOp(self.n, self.N, self.cap, {a: (m * k if isinstance(m, MatPoly) else k * m) for a, k in self.terms.items()})

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def part(self, d: int) -> dict[Exp, MatPoly]:
        return {a: m for a, m in self.terms.items() if sum(a) == d}

    def endomorphism(self) -> MatPoly | None:
        """The coefficient matrix if this operator has no derivative part."""
        if any(any(a) for a in self.terms):
            return None
        return self.terms.get((0,) * self.n, MatPoly.zero(self.N, self.n, self.cap))

    def compose(self, other: MatDiffOp) -> MatDiffOp:
        """(M d^a) o (K d^b) = sum_{g <= a} C(a, g) M (d^g K) d^(a - g + b)."""
        out: dict[Exp, MatPoly] = {}
        for a, m in self.terms.items():
            for b, k in other.terms.items():
                for g in _sub_multi(a):
                    mult = 1
                    dk = k
                    for idx, (ai, gi) in enumerate(zip(a, g)):
                        mult *= comb(ai, gi)
                        for _ in range(gi):
                            dk = dk.partial(idx + 1)
                    if dk.is_zero():
                        continue
                    key = tuple(ai - gi + bi for ai, gi, bi in zip(a, g, b))
                    val = m * dk * mult
                    out[key] = out[key] + val if key in out else val
        return MatDiffOp(self.n, self.N, self.cap, out)

    def __str__(self) -> str:
        parts = []
        for a, m in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), t[0])):
            d = "*".join(f"d{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(a) if k)
            parts.append(f"{m}" + (f"*{d}" if d else ""))
        return " + ".join(parts) if parts else "0"


def _sub_multi(a: Exp):
    if not a:
        yield ()
        return
    for first in range(a[0] + 1):
        for rest in _sub_multi(a[1:]):
            yield (first,) + rest


def nabla_op(c: Connection, i: int) -> MatDiffOp:
    e = tuple(int(k == i - 1) for k in range(c.n))
    return MatDiffOp(c.n, c.N, c.cap, {e: MatPoly.identity(c.N, c.n, c.cap), (0,) * c.n: c.A[i - 1]})


def holonomy_eval(e: Union[PElem, NCOp], c: Connection) -> MatDiffOp:
    """Substitute D_i -> nabla_i and f -> f * identity, then multiply out."""
    op = p_to_nc(e) if isinstance(e, PElem) else e
    if not op.frame.is_coordinate:
        raise DimensionMismatch("holonomy evaluation needs the coordinate frame")
    if op.frame.n != c.n or op.frame.cap != c.cap:
        raise DimensionMismatch("operator and connection shapes differ")
    nablas = {i: nabla_op(c, i) for i in range(1, c.n + 1)}
    memo: dict[tuple[int, ...], MatDiffOp] = {(): MatDiffOp.identity(c.n, c.N, c.cap)}

    def word_op(w: tuple[int, ...]) -> MatDiffOp:
        if w not in memo:
            memo[w] = nablas[w[0]].compose(word_op(w[1:]))
        return memo[w]

    total = MatDiffOp(c.n, c.N, c.cap)
    for w, f in op.terms.items():
        total = total + word_op(w).lmul(f)
    return total


def symmetrized_symbol(sym: Mapping[tuple[int, ...], MPoly], n: int) -> dict[Exp, MPoly]:
    """Send each word to its commutative multi-index and sum coefficients."""
    out: dict[Exp, MPoly] = {}
    for w, f in sym.items():
        a = tuple(w.count(i) for i in range(1, n + 1))
        out[a] = out[a] + f if a in out else f
    return {a: f for a, f in out.items() if f}


# gauge transformations


def gauge_apply(g: Union[GaugeTransform, MatPoly], c: Connection) -> Connection:
    """A_i -> g^-1 A_i g + g^-1 d_i g.

    The degree-``cap`` part of the result depends on ``g`` through degree
    ``cap + 1``, so the computation runs one order higher: a gauge with
    ``cap + 1`` is used in full, one with ``cap`` is read as a polynomial.
    """
    gm = g.g if isinstance(g, GaugeTransform) else g
    if gm.dim != c.N or gm.nvars != c.n or gm.cap < c.cap:
        raise DimensionMismatch("gauge transformation shape does not match connection")
    work = c.cap + 1
    gw = gm.with_cap(work)
    ginv = gw.inverse()
    out = []
    for i, a in enumerate(c.A, start=1):
        aw = a.with_cap(work)
        out.append((ginv * aw * gw + ginv * gw.partial(i)).with_cap(c.cap))
    return Connection(c.n, c.N, c.cap, tuple(out))


def radial_gauge(c: Connection) -> tuple[Connection, GaugeTransform]:
    """Restricted gauge g (to order cap + 1) with sum_i x_i A'_i = 0.

    Solves the Euler recursion k g_k = -sum_{m>=1} (x.A)_m g_(k-m), g_0 = 1.
    """
    work = c.cap + 1
    lifted = c.with_cap(work)
    xa = lifted.radial_residual()
    xa_parts = [xa.homogeneous(m) for m in range(work + 1)]
    g_parts = [MatPoly.identity(c.N, c.n, work)]
    for k in range(1, work + 1):
        acc = MatPoly.zero(c.N, c.n, work)
        for m in range(1, k + 1):
            if not xa_parts[m].is_zero():
                acc = acc + (xa_parts[m] * g_parts[k - m]).homogeneous(k)
        g_parts.append(acc * Fraction(-1, k))
    g = g_parts[0]
    for part in g_parts[1:]:
        g = g + part
    gt = GaugeTransform(g)
    return gauge_apply(gt, c), gt


def _multi_index(seq: Sequence[int], n: int) -> Exp:
    return tuple(sum(1 for s in seq if s == i) for i in range(1, n + 1))


def _deriv_at_zero(beta: Exp, alpha: Exp) -> int:
    """d^beta x^alpha evaluated at 0."""
    if beta != alpha:
        return 0
    out = 1
    for k in alpha:
        out *= factorial(k)
    return out


def reconstruct(j: JetData, cap: int) -> Connection:
    """A radial-gauge polynomial connection whose jets up to j.Dmax equal ``j``.

    Degree by degree: the jets of order k+2 are affine in the degree-(k+1)
    part of A (lower parts fixed), with linear part
    d^(i1..ik) (d_a A_b - d_b A_a)(0).  Together with the radial condition
    x . A^(k+1) = 0 this is a square triangular system solved exactly.
    """
    n, N, dmax = j.n, j.N, j.Dmax
    if dmax - 1 > cap:
        raise CapTooSmall(f"reconstructing jets up to order {dmax} needs cap >= {dmax - 1}")
    target = j.as_dict()
    for d in range(2, dmax + 1):
        for s in generators(n, d):
            target.setdefault(s, tuple(tuple(Fraction(0) for _ in range(N)) for _ in range(N)))
    conn = Connection.zero(n, N, cap)
    for k in range(0, dmax - 1):
        deg = k + 1
        monos = [e for e in monomials_up_to(n, deg) if sum(e) == deg]
        unknowns = [(i, e) for i in range(1, n + 1) for e in monos]
        seqs = list(generators(n, k + 2))
        current = _jet_polys(conn, seqs)
        rows, rhs = [], []
        for s in seqs:
            head, a, b = s[:-2], s[-2], s[-1]
            beta_a = _multi_index(head + (a,), n)
            beta_b = _multi_index(head + (b,), n)
            row = []
            for i, e in unknowns:
                v = 0
                if i == b:
                    v += _deriv_at_zero(beta_a, e)
                if i == a:
                    v -= _deriv_at_zero(beta_b, e)
                row.append(Fraction(v))
            rows.append(row)
            cur = current[s].constant()
            rhs.append([target[s][r][q] - cur[r][q] for r in range(N) for q in range(N)])
        for gamma in (e for e in monomials_up_to(n, deg + 1) if sum(e) == deg + 1):
            row = []
            for i, e in unknowns:
                shifted = tuple(x + (1 if idx == i - 1 else 0) for idx, x in enumerate(e))
                row.append(Fraction(int(shifted == gamma)))
            rows.append(row)
            rhs.append([Fraction(0)] * (N * N))
        sol = solve(rows, rhs)
        new_a = list(conn.A)
        for (i, e), vals in zip(unknowns, sol):
            if not any(vals):
                continue
            mono = MPoly.monomial(e, n, cap)
            add = MatPoly(tuple(tuple(mono * vals[r * N + q] for q in range(N)) for r in range(N)))
            new_a[i - 1] = new_a[i - 1] + add
        conn = Connection(n, N, cap, tuple(new_a))
    return conn
