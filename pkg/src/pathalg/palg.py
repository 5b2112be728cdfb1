"""Sections of the path Lie algebroid over R^n in Hall normal form.

A section is ``sum_h f_h * h`` over Lyndon/Hall brackets ``h`` of the
generators with polynomial coefficients on the left.  The bracket is computed
through the faithful operator representation: expand to an ``NCOp``, take the
commutator, and read the Hall coordinates back slice by slice.  In the
coordinate frame brackets of degree >= 2 commute with functions, which makes
that extraction triangular.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .coeff import MPoly, VectorField, format_terms
from .errors import DimensionMismatch, NotALieElement, NotInP
from .freelie import HallElem, lie_normal_form, lie_to_words
from .ncdiff import AnchorFrame, NCOp, _acc, nc_comm


class PElem:
    __slots__ = ("frame", "terms")

    def __init__(self, frame: AnchorFrame, terms: Mapping[HallElem, MPoly] | None = None):
        if not frame.is_coordinate:
            raise DimensionMismatch("path algebroid sections require the coordinate frame")
        self.frame = frame
        clean: dict[HallElem, MPoly] = {}
        for h, f in (terms or {}).items():
            if isinstance(h, str):
                h = HallElem.parse(h)
            elif not isinstance(h, HallElem):
                h = HallElem(tuple(h))
            if any(not 1 <= i <= frame.n for i in h.word):
                raise DimensionMismatch(f"{h} uses letters outside 1..{frame.n}")
            if isinstance(f, (int, Fraction)):
                f = MPoly.const(frame.n, frame.cap, f)
            _acc(clean, h, f)
        self.terms = clean

    @classmethod
    def section(cls, frame: AnchorFrame, v: VectorField) -> PElem:
        """The degree-1 section sum_i b_i D_i attached to a vector field."""
        return cls(frame, {HallElem((i,)): b for i, b in enumerate(v.components, start=1)})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PElem):
            return NotImplemented
        return self.frame == other.frame and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: PElem) -> PElem:
        out = dict(self.terms)
        for h, f in other.terms.items():
            _acc(out, h, f)
        return PElem(self.frame, out)

    def __neg__(self) -> PElem:
        return PElem(self.frame, {h: -f for h, f in self.terms.items()})

    def __sub__(self, other: PElem) -> PElem:
        return self + (-other)

    def lmul(self, f: MPoly) -> PElem:
        return PElem(self.frame, {h: f * g for h, g in self.terms.items()})

    def level(self) -> int:
        """Filtration level: the largest Hall degree present (0 for the zero section)."""
        return max((h.degree for h in self.terms), default=0)

    def degrees(self) -> set[int]:
        return {h.degree for h in self.terms}

    def slice(self, d: int) -> PElem:
        return PElem(self.frame, {h: f for h, f in self.terms.items() if h.degree == d})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (t[0].degree, t[0].word))

    def to_json(self) -> dict:
        return {
            "n": self.frame.n,
            "cap": self.frame.cap,
            "frame": "coordinate",
            "terms": [{"h": str(h), "f": f.to_json()} for h, f in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> PElem:
        frame = AnchorFrame.coordinate(int(obj["n"]), int(obj["cap"]))
        terms: dict[HallElem, MPoly] = {}
        for t in obj["terms"]:
            _acc(terms, HallElem.parse(t["h"]), MPoly.from_json(t["f"]))
        return cls(frame, terms)

    def __str__(self) -> str:
        pieces = []
        for h, f in self.sorted_terms():
            if len(f.terms) == 1:
                ((e, c),) = f.terms.items()
                mono = str(MPoly(f.nvars, f.cap, {e: 1})) if any(e) else ""
                pieces.append((f"{mono}*{h}" if mono else str(h), c))
            else:
                pieces.append((f"({f})*{h}", Fraction(1)))
        return format_terms(pieces)

    def __repr__(self) -> str:
        return f"PElem({self})"


def p_to_nc(x: PElem) -> NCOp:
    out: dict = {}
    for h, f in x.terms.items():
        for w, c in lie_to_words({h: 1}).items():
            _acc(out, w, f * c)
    return NCOp(x.frame, out)


def nc_to_p(p: NCOp) -> PElem:
    """Hall coordinates of an operator lying in the path algebroid."""
    if not p.frame.is_coordinate:
        raise DimensionMismatch("Hall extraction requires the coordinate frame")
    if () in p.terms:
        raise NotInP(f"operator has a function part {p.terms[()]}; sections have no degree-0 part")
    coords: dict[HallElem, MPoly] = {}
    for d in sorted({len(w) for w in p.terms}, reverse=True):
        slice_d = {w: f for w, f in p.terms.items() if len(w) == d}
        try:
            part = lie_normal_form(slice_d, d)
        except NotALieElement as exc:
            raise NotInP(f"degree-{d} part is not a Lie element: {exc}") from None
        coords.update(part)
    return PElem(p.frame, coords)


def p_bracket(x: PElem, y: PElem) -> PElem:
    if x.frame != y.frame:
        raise DimensionMismatch("sections live on different frames")
    return nc_to_p(nc_comm(p_to_nc(x), p_to_nc(y)))


def anchor(x: PElem) -> VectorField:
    n, cap = x.frame.n, x.frame.cap
    comps = [MPoly.zero(n, cap) for _ in range(n)]
    for h, f in x.terms.items():
        if h.degree == 1:
            comps[h.word[0] - 1] = comps[h.word[0] - 1] + f
    return VectorField(tuple(comps))


@dataclass(frozen=True)
class Bivector:
    """sum_{i<j} f_ij d_i ^ d_j."""

    n: int
    cap: int
    coefficients: tuple[tuple[tuple[int, int], MPoly], ...]

    def __post_init__(self):
        items = tuple(sorted((tuple(k), f) for k, f in dict(self.coefficients).items()))
        for (i, j), f in items:
            if not 1 <= i < j <= self.n:
                raise DimensionMismatch(f"bivector index pair ({i},{j}) must satisfy 1 <= i < j <= n")
            if f.nvars != self.n or f.cap != self.cap:
                raise DimensionMismatch("bivector coefficient shape mismatch")
        object.__setattr__(self, "coefficients", items)

    @classmethod
    def from_dict(cls, n: int, cap: int, coeffs: Mapping[tuple[int, int], MPoly]) -> Bivector:
        return cls(n, cap, tuple(coeffs.items()))


def c_map(b: Bivector) -> PElem:
    """Curvature embedding: f (v ^ w) -> f ([D_v, D_w] - D_[v,w])."""
    frame = AnchorFrame.coordinate(b.n, b.cap)
    out = PElem(frame)
    for (i, j), f in b.coefficients:
        vi = VectorField.coordinate(i, b.n, b.cap)
        vj = VectorField.coordinate(j, b.n, b.cap)
        term = p_bracket(PElem.section(frame, vi), PElem.section(frame, vj)) - PElem.section(frame, vi.bracket(vj))
        out = out + term.lmul(f)
    return out
