"""Free Lie algebra on letters 1..n: Lyndon words and their standard bracketings.

Words are tuples of ints.  A bracket tree is either an int (a letter) or a
pair ``(left, right)``.  The Hall basis used throughout the package is the
Lyndon basis with standard factorization; expanding a basis element into the
tensor algebra gives its Lyndon word as the lex-smallest word, with
coefficient 1, which makes coordinate extraction a greedy elimination.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping, Union

from .errors import InvalidWord, NotALieElement

Word = tuple[int, ...]
Tree = Union[int, tuple["Tree", "Tree"]]


def is_lyndon(w: Word) -> bool:
    """Strictly smaller than every proper nonempty suffix."""
    return len(w) > 0 and all(w < w[i:] for i in range(1, len(w)))


@lru_cache(maxsize=None)
def lyndon_words(n: int, d: int) -> tuple[Word, ...]:
    """Lyndon words of length d over 1..n, in lexicographic order (Duval's generator)."""
    if n < 1 or d < 1:
        return ()
    out = []
    w = [1]
    while w:
        if len(w) == d:
            out.append(tuple(w))
        m = len(w)
        while len(w) < d:
            w.append(w[len(w) - m])
        while w and w[-1] == n:
            w.pop()
        if w:
            w[-1] += 1
    return tuple(out)


def _mobius(k: int) -> int:
    result, p = 1, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            result = -result
        p += 1
    return -result if k > 1 else result


def witt_dim(n: int, d: int) -> int:
    """Dimension of the degree-d part of the free Lie algebra on n letters."""
    total = sum(_mobius(e) * n ** (d // e) for e in range(1, d + 1) if d % e == 0)
    return total // d


def _standard_split(w: Word) -> tuple[Word, Word]:
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise InvalidWord(f"{w} has no standard factorization")


@lru_cache(maxsize=None)
def _bracketing(w: Word) -> Tree:
    if len(w) == 1:
        return w[0]
    u, v = _standard_split(w)
    return (_bracketing(u), _bracketing(v))


def tree_str(t: Tree) -> str:
    if isinstance(t, int):
        return str(t)
    return f"[{tree_str(t[0])},{tree_str(t[1])}]"


def tree_leaves(t: Tree) -> Word:
    if isinstance(t, int):
        return (t,)
    return tree_leaves(t[0]) + tree_leaves(t[1])


def parse_tree(s: str) -> Tree:
    """Inverse of :func:`tree_str`; a lone letter may be written ``1`` or ``[1]``."""
    s = s.replace(" ", "")

    def rec(i: int) -> tuple[Tree, int]:
        if s[i] == "[":
            left, i = rec(i + 1)
            if s[i] == "]":
                return left, i + 1
            if s[i] != ",":
                raise InvalidWord(f"malformed bracket {s!r}")
            right, i = rec(i + 1)
            if s[i] != "]":
                raise InvalidWord(f"malformed bracket {s!r}")
            return (left, right), i + 1
        j = i
        while j < len(s) and s[j].isdigit():
            j += 1
        if j == i:
            raise InvalidWord(f"malformed bracket {s!r}")
        return int(s[i:j]), j

    try:
        t, end = rec(0)
    except IndexError:
        raise InvalidWord(f"malformed bracket {s!r}") from None
    if end != len(s):
        raise InvalidWord(f"trailing text in bracket {s!r}")
    return t


@dataclass(frozen=True, order=True)
class HallElem:
    """Lyndon word together with its standard bracketing."""

    word: Word
    tree: Tree = None  # derived from word

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        expected = _bracketing(self.word) if is_lyndon(self.word) else None
        if expected is None:
            raise InvalidWord(f"{word_str(self.word)} is not a Lyndon word")
        if self.tree is not None and self.tree != expected:
            raise InvalidWord(f"tree {tree_str(self.tree)} is not the standard bracketing")
        object.__setattr__(self, "tree", expected)

    @property
    def degree(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return "[" + str(self.tree) + "]" if isinstance(self.tree, int) else tree_str(self.tree)

    @classmethod
    def parse(cls, s: str) -> HallElem:
        t = parse_tree(s)
        return cls(tree_leaves(t), t)


def standard_bracketing(w: Word) -> HallElem:
    w = tuple(w)
    if not is_lyndon(w):
        raise InvalidWord(f"{word_str(w)} is not a Lyndon word")
    return HallElem(w)


@lru_cache(maxsize=None)
def hall_basis(n: int, d: int) -> tuple[HallElem, ...]:
    return tuple(HallElem(w) for w in lyndon_words(n, d))


def word_str(w: Word, n: int | None = None) -> str:
    if n is not None and n > 9:
        return ",".join(map(str, w))
    if any(x > 9 for x in w):
        return ",".join(map(str, w))
    return "".join(map(str, w))


# tensor-algebra elements: dict Word -> coefficient


def _add_into(acc: dict, w: Word, c: Any) -> None:
    s = acc[w] + c if w in acc else c
    if s:
        acc[w] = s
    else:
        acc.pop(w, None)


def word_mul(p: Mapping[Word, Any], q: Mapping[Word, Any]) -> dict[Word, Any]:
    out: dict[Word, Any] = {}
    for u, a in p.items():
        for v, b in q.items():
            _add_into(out, u + v, a * b)
    return out


def word_comm(p: Mapping[Word, Any], q: Mapping[Word, Any]) -> dict[Word, Any]:
    out = word_mul(p, q)
    for w, c in word_mul(q, p).items():
        _add_into(out, w, -c)
    return out


@lru_cache(maxsize=None)
def _expand_cached(t: Tree) -> tuple[tuple[Word, int], ...]:
    if isinstance(t, int):
        return (((t,), 1),)
    left = dict(_expand_cached(t[0]))
    right = dict(_expand_cached(t[1]))
    return tuple(sorted(word_comm(left, right).items()))


def expand_to_words(t: Union[Tree, HallElem]) -> dict[Word, Fraction]:
    """Expand a bracket tree into the word algebra via [u, v] = uv - vu."""
    if isinstance(t, HallElem):
        t = t.tree
    return {w: Fraction(c) for w, c in _expand_cached(t)}


def lie_normal_form(p: Mapping[Word, Any], d: int | None = None) -> dict[HallElem, Any]:
    """Hall coordinates of a Lie element given in word coordinates.

    Coefficients may be any ring elements supporting +, -, * and truthiness
    (Fractions or MPoly).  Works degree by degree; ``d`` optionally asserts
    homogeneity.  Raises NotALieElement if the elimination leaves a residual.
    """
    residual = {tuple(w): c for w, c in p.items() if c}
    if d is not None and any(len(w) != d for w in residual):
        raise NotALieElement(f"input is not homogeneous of degree {d}")
    coords: dict[HallElem, Any] = {}
    while residual:
        w = min(residual, key=lambda u: (len(u), u))
        if not is_lyndon(w):
            raise NotALieElement(f"residual word {word_str(w)} is not Lyndon; input is not a Lie element")
        c = residual[w]
        h = HallElem(w)
        coords[h] = c
        for u, k in _expand_cached(h.tree):
            _add_into(residual, u, -(c * k) if k != 1 else -c)
    return coords


def lie_to_words(coords: Mapping[HallElem, Any]) -> dict[Word, Any]:
    out: dict[Word, Any] = {}
    for h, c in coords.items():
        for u, k in _expand_cached(h.tree):
            _add_into(out, u, c * k if k != 1 else c)
    return out


class LiePoly:
    """Element of the free Lie algebra with rational Hall coordinates."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[HallElem, Any] | None = None):
        self.terms = {h: Fraction(c) for h, c in (terms or {}).items() if c}

    @classmethod
    def basis(cls, word: Word) -> LiePoly:
        return cls({HallElem(tuple(word)): 1})

    def to_words(self) -> dict[Word, Fraction]:
        return lie_to_words(self.terms)

    @classmethod
    def from_words(cls, p: Mapping[Word, Any]) -> LiePoly:
        return cls(lie_normal_form(p))

    def bracket(self, other: LiePoly) -> LiePoly:
        return LiePoly.from_words(word_comm(self.to_words(), other.to_words()))

    def __add__(self, other: LiePoly) -> LiePoly:
        out = dict(self.terms)
        for h, c in other.terms.items():
            _add_into(out, h, c)
        return LiePoly(out)

    def __neg__(self) -> LiePoly:
        return LiePoly({h: -c for h, c in self.terms.items()})

    def __sub__(self, other: LiePoly) -> LiePoly:
        return self + (-other)

    def __mul__(self, c) -> LiePoly:
        return LiePoly({h: v * c for h, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LiePoly) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        items = sorted(self.terms.items(), key=lambda t: (t[0].degree, t[0].word))
        return "LiePoly(" + ", ".join(f"{c}*{h}" for h, c in items) + ")"
