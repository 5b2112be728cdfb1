"""Noncommutative differential operators.

An operator is stored in left normal form ``sum_w f_w * D_w``: the
coefficient ``f_w`` (an MPoly) sits to the left of the word ``D_w`` in the
free generators D_1..D_n.  Multiplication pushes generators past functions
with ``D_i f = f D_i + b_i(f)`` where ``b_i`` is the anchor of ``D_i``
(``b_i = d/dx_i`` for the coordinate frame).

Truncation caveat: the two-sided ideal generated by high-degree functions is
everything, so the algebra laws hold exactly only while no intermediate
coefficient exceeds the cap.  Callers that check identities size the cap
accordingly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Union

from .coeff import MPoly, VectorField, format_terms, monomials_up_to
from .errors import DimensionMismatch, IndexOutOfRange
from .expr import Add, Bracket, Const, Gen, Mul, Neg, OpExpr, Pow, Sub, Var
from .freelie import Word

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class AnchorFrame:
    """Generators D_1..D_n with anchors b_1..b_n (vector fields in n variables)."""

    n: int
    cap: int
    anchors: tuple[VectorField, ...] | None = None  # None means the coordinate frame

    def __post_init__(self):
        if self.anchors is not None:
            anchors = tuple(self.anchors)
            object.__setattr__(self, "anchors", anchors)
            if len(anchors) != self.n or any(b.nvars != self.n or b.cap != self.cap for b in anchors):
                raise DimensionMismatch("anchors must be n vector fields sharing nvars = n and cap")

    @classmethod
    def coordinate(cls, n: int, cap: int) -> AnchorFrame:
        return cls(n, cap)

    @property
    def is_coordinate(self) -> bool:
        return self.anchors is None

    def anchor(self, i: int) -> VectorField:
        if self.anchors is None:
            return VectorField.coordinate(i, self.n, self.cap)
        return self.anchors[i - 1]

    def act(self, i: int, f: MPoly) -> MPoly:
        if self.anchors is None:
            return f.partial(i)
        return self.anchors[i - 1].apply(f)

    def to_json(self):
        return "coordinate" if self.anchors is None else [b.to_json() for b in self.anchors]

    @classmethod
    def from_json(cls, obj, n: int, cap: int) -> AnchorFrame:
        if obj in (None, "coordinate"):
            return cls(n, cap)
        return cls(n, cap, tuple(VectorField.from_json(b) for b in obj))


@lru_cache(maxsize=200_000)
def _push(frame: AnchorFrame, u: Word, g: MPoly) -> tuple[tuple[Word, MPoly], ...]:
    """Normal form of ``D_u * g`` as pairs (word, coefficient)."""
    if not u:
        return (((), g),)
    i = u[0]
    out: dict[Word, MPoly] = {}
    for w, h in _push(frame, u[1:], g):
        _acc(out, (i,) + w, h)
        dh = frame.act(i, h)
        if dh:
            _acc(out, w, dh)
    return tuple(out.items())


def _acc(d: dict, key, val) -> None:
    if key in d:
        s = d[key] + val
        if s:
            d[key] = s
        else:
            del d[key]
    elif val:
        d[key] = val


class NCOp:
    """Element of the operator algebra in left normal form."""

    __slots__ = ("frame", "terms")

    def __init__(self, frame: AnchorFrame, terms: Mapping[Word, MPoly] | None = None):
        self.frame = frame
        clean: dict[Word, MPoly] = {}
        for w, f in (terms or {}).items():
            w = tuple(w)
            if any(not 1 <= i <= frame.n for i in w):
                raise IndexOutOfRange(f"generator index in {w} out of range 1..{frame.n}")
            if isinstance(f, (int, Fraction)):
                f = MPoly.const(frame.n, frame.cap, f)
            if f.nvars != frame.n or f.cap != frame.cap:
                raise DimensionMismatch("coefficient shape does not match frame")
            _acc(clean, w, f)
        self.terms = clean

    # constructors
    @classmethod
    def zero(cls, frame: AnchorFrame) -> NCOp:
        return cls(frame)

    @classmethod
    def scalar(cls, frame: AnchorFrame, c: Scalar) -> NCOp:
        return cls(frame, {(): MPoly.const(frame.n, frame.cap, c)})

    @classmethod
    def function(cls, frame: AnchorFrame, f: MPoly) -> NCOp:
        return cls(frame, {(): f})

    @classmethod
    def generator(cls, frame: AnchorFrame, i: int) -> NCOp:
        return cls(frame, {(i,): MPoly.one(frame.n, frame.cap)})

    @classmethod
    def word(cls, frame: AnchorFrame, w: Iterable[int], f: MPoly | Scalar = 1) -> NCOp:
        return cls(frame, {tuple(w): f})

    # queries
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCOp):
            return NotImplemented
        return self.frame == other.frame and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.frame, frozenset(self.terms.items())))

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[Word, MPoly]]:
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def _check(self, other: NCOp) -> None:
        if self.frame != other.frame:
            raise DimensionMismatch("operators live on different frames")

    # arithmetic
    def __add__(self, other: NCOp) -> NCOp:
        self._check(other)
        out = dict(self.terms)
        for w, f in other.terms.items():
            _acc(out, w, f)
        return _raw(self.frame, out)

    def __neg__(self) -> NCOp:
        return _raw(self.frame, {w: -f for w, f in self.terms.items()})

    def __sub__(self, other: NCOp) -> NCOp:
        return self + (-other)

    def __mul__(self, other) -> NCOp:
        if isinstance(other, NCOp):
            return nc_mul(self, other)
        if isinstance(other, (int, Fraction)):
            return _raw(self.frame, {w: f * other for w, f in self.terms.items() if f * other})
        if isinstance(other, MPoly):
            return nc_mul(self, NCOp.function(self.frame, other))
        return NotImplemented

    def __rmul__(self, other) -> NCOp:
        if isinstance(other, (int, Fraction)):
            return self * other
        if isinstance(other, MPoly):
            return self.lmul(other)
        return NotImplemented

    def lmul(self, f: MPoly) -> NCOp:
        """Left multiplication by a function (the left A-module structure)."""
        out = {}
        for w, g in self.terms.items():
            _acc(out, w, f * g)
        return _raw(self.frame, out)

    def slice(self, d: int) -> NCOp:
        return _raw(self.frame, {w: f for w, f in self.terms.items() if len(w) == d})

    def to_json(self) -> dict:
        return {
            "n": self.frame.n,
            "cap": self.frame.cap,
            "frame": self.frame.to_json(),
            "terms": [{"w": list(w), "f": f.to_json()} for w, f in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> NCOp:
        n, cap = int(obj["n"]), int(obj["cap"])
        frame = AnchorFrame.from_json(obj.get("frame", "coordinate"), n, cap)
        terms: dict[Word, MPoly] = {}
        for t in obj["terms"]:
            _acc(terms, tuple(t["w"]), MPoly.from_json(t["f"]))
        return cls(frame, terms)

    def __str__(self) -> str:
        return format_op(self.terms)

    def __repr__(self) -> str:
        return f"NCOp({self})"


def _raw(frame: AnchorFrame, terms: dict[Word, MPoly]) -> NCOp:
    obj = NCOp.__new__(NCOp)
    obj.frame, obj.terms = frame, terms
    return obj


def gen_word_str(w: Word, letter: str = "D") -> str:
    return "*".join(f"{letter}{i}" for i in w)


def format_op(terms: Mapping[Word, MPoly], letter: str = "D") -> str:
    """Text form: longest words first, then lex; multi-term coefficients parenthesized."""
    items = sorted(terms.items(), key=lambda t: (-len(t[0]), t[0]))
    pieces: list[tuple[str, Fraction]] = []
    for w, f in items:
        body = gen_word_str(w, letter)
        if len(f.terms) == 1:
            ((e, c),) = f.terms.items()
            mono = "*".join(p for p in (str(MPoly(f.nvars, f.cap, {e: 1})) if any(e) else "", body) if p)
            pieces.append((mono, c))
        elif not w:
            pieces.extend(
                (str(MPoly(f.nvars, f.cap, {e: 1})) if any(e) else "", c) for e, c in f.sorted_terms()
            )
        else:
            pieces.append((f"({f})*{body}", Fraction(1)))
    return format_terms(pieces)


def nc_mul(p: NCOp, q: NCOp) -> NCOp:
    p._check(q)
    frame = p.frame
    out: dict[Word, MPoly] = {}
    for u, f in p.terms.items():
        for v, g in q.terms.items():
            for w, h in _push(frame, u, g):
                _acc(out, w + v, f * h)
    return _raw(frame, out)


def nc_comm(p: NCOp, q: NCOp) -> NCOp:
    return nc_mul(p, q) - nc_mul(q, p)


def counit(p: NCOp) -> MPoly:
    """P applied to the constant function 1: the empty-word coefficient."""
    return p.terms.get((), MPoly.zero(p.frame.n, p.frame.cap))


def apply_to_function(p: NCOp, a: MPoly) -> MPoly:
    """The left module action of operators on functions, counit(P * a)."""
    return counit(nc_mul(p, NCOp.function(p.frame, a)))


# expressions -> normal form


def _eval_expr(e: OpExpr, frame: AnchorFrame) -> NCOp:
    n, cap = frame.n, frame.cap
    if isinstance(e, Const):
        return NCOp.scalar(frame, e.value)
    if isinstance(e, Var):
        if not 1 <= e.index <= n:
            raise IndexOutOfRange(f"x{e.index} out of range 1..{n}")
        return NCOp.function(frame, MPoly.var(e.index, n, cap))
    if isinstance(e, Gen):
        if not 1 <= e.index <= n:
            raise IndexOutOfRange(f"D{e.index} out of range 1..{n}")
        return NCOp.generator(frame, e.index)
    if isinstance(e, Neg):
        return -_eval_expr(e.arg, frame)
    if isinstance(e, Add):
        return _eval_expr(e.left, frame) + _eval_expr(e.right, frame)
    if isinstance(e, Sub):
        return _eval_expr(e.left, frame) - _eval_expr(e.right, frame)
    if isinstance(e, Mul):
        return nc_mul(_eval_expr(e.left, frame), _eval_expr(e.right, frame))
    if isinstance(e, Bracket):
        return nc_comm(_eval_expr(e.left, frame), _eval_expr(e.right, frame))
    if isinstance(e, Pow):
        base = _eval_expr(e.base, frame)
        out = NCOp.scalar(frame, 1)
        for _ in range(e.exp):
            out = nc_mul(out, base)
        return out
    raise TypeError(f"malformed expression node {e!r}")


# atom sequences for the term-rewriting route: int i is D_i, MPoly is a function
Atom = Union[int, MPoly]


def _expand_atoms(e: OpExpr, frame: AnchorFrame) -> dict[tuple[Atom, ...], Fraction]:
    n, cap = frame.n, frame.cap
    if isinstance(e, Const):
        return {(): Fraction(e.value)} if e.value else {}
    if isinstance(e, Var):
        if not 1 <= e.index <= n:
            raise IndexOutOfRange(f"x{e.index} out of range 1..{n}")
        return {(MPoly.var(e.index, n, cap),): Fraction(1)}
    if isinstance(e, Gen):
        if not 1 <= e.index <= n:
            raise IndexOutOfRange(f"D{e.index} out of range 1..{n}")
        return {(e.index,): Fraction(1)}

    def lin(a, b, sign):
        out = dict(a)
        for k, v in b.items():
            _acc(out, k, sign * v)
        return out

    def prod(a, b):
        out: dict = {}
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                _acc(out, k1 + k2, v1 * v2)
        return out

    if isinstance(e, Neg):
        return {k: -v for k, v in _expand_atoms(e.arg, frame).items()}
    if isinstance(e, Add):
        return lin(_expand_atoms(e.left, frame), _expand_atoms(e.right, frame), 1)
    if isinstance(e, Sub):
        return lin(_expand_atoms(e.left, frame), _expand_atoms(e.right, frame), -1)
    if isinstance(e, Mul):
        return prod(_expand_atoms(e.left, frame), _expand_atoms(e.right, frame))
    if isinstance(e, Bracket):
        a, b = _expand_atoms(e.left, frame), _expand_atoms(e.right, frame)
        return lin(prod(a, b), prod(b, a), -1)
    if isinstance(e, Pow):
        base = _expand_atoms(e.base, frame)
        out = {(): Fraction(1)}
        for _ in range(e.exp):
            out = prod(out, base)
        return out
    raise TypeError(f"malformed expression node {e!r}")


def _redexes(seq: tuple[Atom, ...]) -> list[int]:
    out = []
    for k in range(len(seq) - 1):
        if isinstance(seq[k + 1], MPoly):
            out.append(k)
    return out


def _rewrite(atoms: dict[tuple[Atom, ...], Fraction], frame: AnchorFrame, rightmost: bool) -> NCOp:
    """Apply D_i f -> f D_i + b_i(f) and f g -> fg one redex at a time."""
    done: dict[Word, MPoly] = {}
    work = list(atoms.items())
    while work:
        seq, c = work.pop()
        if any(isinstance(a, MPoly) and not a for a in seq):
            continue
        reds = _redexes(seq)
        if not reds:
            if seq and isinstance(seq[0], MPoly):
                f, word = seq[0], seq[1:]
            else:
                f, word = MPoly.one(frame.n, frame.cap), seq
            _acc(done, tuple(word), f * c)
            continue
        k = reds[-1] if rightmost else reds[0]
        left, a, b, right = seq[:k], seq[k], seq[k + 1], seq[k + 2:]
        if isinstance(a, MPoly):
            work.append((left + (a * b,) + right, c))
        else:
            work.append((left + (b, a) + right, c))
            db = frame.act(a, b)
            if db:
                work.append((left + (db,) + right, c))
    return _raw(frame, done)


def nc_normalize(e: OpExpr, frame: AnchorFrame, strategy: str = "algebraic") -> NCOp:
    """Left normal form of an expression.

    ``algebraic`` evaluates the tree bottom-up with :func:`nc_mul`;
    ``leftmost`` and ``rightmost`` expand into generator/function strings and
    rewrite one redex at a time from the chosen end.  All three agree.
    """
    if strategy == "algebraic":
        return _eval_expr(e, frame)
    if strategy in ("leftmost", "rightmost"):
        return _rewrite(_expand_atoms(e, frame), frame, strategy == "rightmost")
    raise ValueError(f"unknown strategy {strategy!r}")


# coproduct and the Takeuchi product


def unshuffles(w: Word) -> dict[tuple[Word, Word], int]:
    """Multiplicities of splittings of w into complementary subwords (u, v)."""
    out: dict[tuple[Word, Word], int] = {}
    idx = range(len(w))
    for k in range(len(w) + 1):
        for s in combinations(idx, k):
            sset = set(s)
            u = tuple(w[i] for i in s)
            v = tuple(w[i] for i in idx if i not in sset)
            out[(u, v)] = out.get((u, v), 0) + 1
    return out


class TensorOp:
    """Element of H (x)_A H with all coefficients moved to the far left.

    ``terms[(u, v)] = f`` stands for ``f D_u (x) D_v``; relation
    ``a u1 (x) u2 = u1 (x) a u2`` has been used to collect coefficients.
    """

    __slots__ = ("frame", "terms")

    def __init__(self, frame: AnchorFrame, terms: Mapping[tuple[Word, Word], MPoly] | None = None):
        self.frame = frame
        clean: dict = {}
        for k, f in (terms or {}).items():
            if isinstance(f, (int, Fraction)):
                f = MPoly.const(frame.n, frame.cap, f)
            _acc(clean, (tuple(k[0]), tuple(k[1])), f)
        self.terms = clean

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorOp):
            return NotImplemented
        return self.frame == other.frame and self.terms == other.terms

    def __add__(self, other: TensorOp) -> TensorOp:
        out = dict(self.terms)
        for k, f in other.terms.items():
            _acc(out, k, f)
        return TensorOp(self.frame, out)

    def __sub__(self, other: TensorOp) -> TensorOp:
        return self + TensorOp(other.frame, {k: -f for k, f in other.terms.items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __mul__(self, other: TensorOp) -> TensorOp:
        """Componentwise product; well defined when ``self`` satisfies the Takeuchi condition."""
        out: dict = {}
        for (u, v), f in self.terms.items():
            for (u2, v2), g in other.terms.items():
                for w, h in _push(self.frame, u, g):
                    _acc(out, (w + u2, v + v2), f * h)
        return TensorOp(self.frame, out)

    def act_right(self, a: MPoly, factor: int) -> TensorOp:
        """Right multiplication by ``a`` on the first (factor=1) or second (factor=2) factor."""
        out: dict = {}
        for (u, v), f in self.terms.items():
            if factor == 1:
                for w, h in _push(self.frame, u, a):
                    _acc(out, (w, v), f * h)
            else:
                for w, h in _push(self.frame, v, a):
                    _acc(out, (u, w), f * h)
        return TensorOp(self.frame, out)

    def __str__(self) -> str:
        items = sorted(self.terms.items(), key=lambda t: (len(t[0][0]) + len(t[0][1]), t[0]))
        parts = []
        for (u, v), f in items:
            left = gen_word_str(u) or "1"
            right = gen_word_str(v) or "1"
            parts.append((f"{left}(x){right}" if f == 1 else f"({f})*{left}(x){right}", Fraction(1)))
        return format_terms(parts)


def coproduct(p: NCOp) -> TensorOp:
    """Coproduct making every D_i primitive: f D_w -> f * sum of unshuffles."""
    out: dict = {}
    for w, f in p.terms.items():
        for key, mult in unshuffles(w).items():
            _acc(out, key, f * mult)
    return TensorOp(p.frame, out)


def tensor_square(p: NCOp) -> TensorOp:
    """``P (x) P`` for an operator with constant coefficients."""
    out: dict = {}
    for u, f in p.terms.items():
        for v, g in p.terms.items():
            _acc(out, (u, v), f * g)
    return TensorOp(p.frame, out)


def counit_left(t: TensorOp) -> NCOp:
    """(eps (x) id): keep terms whose first factor is a pure function."""
    return NCOp(t.frame, {v: f for (u, v), f in t.terms.items() if not u})


def counit_right(t: TensorOp) -> NCOp:
    """(id (x) eps) evaluated on the coefficient-left representative."""
    return NCOp(t.frame, {u: f for (u, v), f in t.terms.items() if not v})


def coassoc_sides(p: NCOp) -> tuple[dict, dict]:
    """((Delta (x) id) Delta P, (id (x) Delta) Delta P) as dicts over word triples."""
    left: dict = {}
    right: dict = {}
    for (u, v), f in coproduct(p).terms.items():
        for (u1, u2), m in unshuffles(u).items():
            _acc(left, (u1, u2, v), f * m)
        for (v1, v2), m in unshuffles(v).items():
            _acc(right, (u, v1, v2), f * m)
    return left, right


def takeuchi_check(t: TensorOp, max_test_degree: int) -> bool:
    """Test ``sum u_i a (x) v_i == sum u_i (x) v_i a`` on all monomials a of bounded degree."""
    frame = t.frame
    for e in monomials_up_to(frame.n, min(max_test_degree, frame.cap)):
        a = MPoly.monomial(e, frame.n, frame.cap)
        if t.act_right(a, 1) != t.act_right(a, 2):
            return False
    return True


# symbols


def smbl(p: NCOp, d: int) -> dict[Word, MPoly]:
    """Word-length-d part of P (its class in the associated graded tensor algebra)."""
    return {w: f for w, f in p.terms.items() if len(w) == d}


def symbol_mul(s: Mapping[Word, MPoly], t: Mapping[Word, MPoly]) -> dict[Word, MPoly]:
    out: dict[Word, MPoly] = {}
    for u, f in s.items():
        for v, g in t.items():
            _acc(out, u + v, f * g)
    return out


def laplacian(frame: AnchorFrame) -> NCOp:
    return NCOp(frame, {(i, i): MPoly.one(frame.n, frame.cap) for i in range(1, frame.n + 1)})
