"""Hypothesis strategies for the library's value types."""
from fractions import Fraction

from hypothesis import strategies as st

from pathalg.coeff import MatPoly, MPoly, VectorField, monomials_up_to
from pathalg.connection import Connection
from pathalg.chen import PLPath
from pathalg.freelie import hall_basis
from pathalg.ncdiff import AnchorFrame, NCOp
from pathalg.palg import PElem

rats = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))
small_rats = st.builds(Fraction, st.integers(-3, 3), st.integers(1, 2))


@st.composite
def mpolys(draw, n, cap, deg=None):
    deg = cap if deg is None else min(deg, cap)
    monos = list(monomials_up_to(n, deg))
    chosen = draw(st.lists(st.sampled_from(monos), max_size=5, unique=True))
    return MPoly(n, cap, {e: draw(rats) for e in chosen})


@st.composite
def vector_fields(draw, n, cap, deg):
    return VectorField(tuple(draw(mpolys(n, cap, deg)) for _ in range(n)))


@st.composite
def matpolys(draw, N, n, cap, deg):
    return MatPoly(tuple(tuple(draw(mpolys(n, cap, deg)) for _ in range(N)) for _ in range(N)))


@st.composite
def ncops(draw, frame, max_len, coeff_deg, max_terms=3):
    words = draw(
        st.lists(st.lists(st.integers(1, frame.n), max_size=max_len).map(tuple), max_size=max_terms, unique=True)
    )
    return NCOp(frame, {w: draw(mpolys(frame.n, frame.cap, coeff_deg)) for w in words})


@st.composite
def pelems(draw, frame, level, coeff_deg, max_terms=3):
    basis = [h for d in range(1, level + 1) for h in hall_basis(frame.n, d)]
    hs = draw(st.lists(st.sampled_from(basis), max_size=max_terms, unique=True))
    return PElem(frame, {h: draw(mpolys(frame.n, frame.cap, coeff_deg)) for h in hs})


@st.composite
def connections(draw, n, N, cap, deg):
    return Connection(n, N, cap, tuple(draw(matpolys(N, n, cap, deg)) for _ in range(n)))


@st.composite
def points(draw, n):
    return tuple(draw(small_rats) for _ in range(n))


@st.composite
def paths(draw, n, max_segments=4, start=None):
    k = draw(st.integers(1, max_segments))
    pts = [start if start is not None else draw(points(n))] + [draw(points(n)) for _ in range(k)]
    return PLPath(tuple(pts))


def coordinate(n, cap):
    return AnchorFrame.coordinate(n, cap)
