from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from pathalg import sampling
from pathalg.coeff import MatPoly, MPoly, rat_identity, rat_matmul
from pathalg.connection import Connection
from pathalg.chen import (
    ChenSeries,
    PLPath,
    chen_series,
    compose,
    concat_integrals,
    grouplike_check,
    matrix_exp_nilpotent,
    picard_transport,
    seg_integrals,
    segment_exponentials,
    shuffle,
    shuffle_check,
    source_eval,
    start_point,
    transport,
)
from pathalg.errors import DimensionMismatch, EndpointMismatch
from strategies import connections, paths, points

F = Fraction


def path(*pts):
    return PLPath(tuple(tuple(F(x) for x in p) for p in pts))


SQUARE = path((0, 0), (1, 0), (1, 1), (0, 1), (0, 0))


def iterated_integrals(pts, cap):
    """Integrate dx_{w1}...dx_{wp} over t1 < ... < tp directly, one segment at a time.

    Each running integral is kept as a polynomial in the local segment
    parameter (list of coefficients).
    """
    n = len(pts[0])
    words = [w for p in range(cap + 1) for w in product(range(1, n + 1), repeat=p)]
    at = {w: F(int(not w)) for w in words}  # values at the current breakpoint
    for p, q in zip(pts, pts[1:]):
        v = [F(b) - F(a) for a, b in zip(p, q)]
        local = {(): [F(1)]}
        for w in words[1:]:
            prev = local[w[:-1]]
            integ = [at[w]] + [c * v[w[-1] - 1] / (k + 1) for k, c in enumerate(prev)]
            local[w] = integ
        at = {w: sum(local[w], F(0)) for w in words}
    return at


def test_seg_integrals_examples():
    assert seg_integrals((1, 0), 2)[(1,)] == 1
    assert seg_integrals((1, 2), 2)[(1, 2)] == 1
    assert seg_integrals((1, 2), 2)[(1, 1)] == F(1, 2)
    assert (2,) not in seg_integrals((1, 0), 2)


def test_concat_example():
    out = concat_integrals(seg_integrals((1, 0), 2), seg_integrals((0, 1), 2), 2)
    assert out[(1, 2)] == 1 and out.get((2, 1), 0) == 0
    unit = {(): F(1)}
    base = seg_integrals((2, 3), 3)
    assert concat_integrals(unit, base, 3) == base == concat_integrals(base, unit, 3)


def test_square_loop():
    e = chen_series(SQUARE, 3)
    assert e[(1,)] == 0 and e[(2,)] == 0
    assert e[(1, 2)] == -1 and e[(2, 1)] == 1
    assert e.target == (0, 0)
    assert grouplike_check(e)


def test_single_segment_uses_reversed_displacement():
    v = (F(2), F(-1))
    e = chen_series(path((0, 0), v), 3)
    assert e[(1, 1, 2)] == (-v[0]) * (-v[0]) * (-v[1]) / 6
    assert e.target == v


def test_constant_path_is_identity():
    e = chen_series(path((1, 2), (1, 2)), 3)
    assert e == ChenSeries.identity(2, 3, (1, 2))


@pytest.mark.parametrize("pts", [[(0, 0), (1, 0), (1, 1)], [(3, 0), (5, 1), (2, 2)], [(0, 0, 1), (1, 2, 0)]])
def test_series_matches_direct_integration(pts):
    p = path(*pts)
    e = chen_series(p, 4)
    want = iterated_integrals(pts[::-1], 4)
    assert all(e[w] == c for w, c in want.items())


def test_broken_series_not_grouplike():
    e = chen_series(path((0, 0), (1, 2), (0, 3)), 3)
    broken = e.with_value((1, 2), e[(1, 2)] + 1)
    assert shuffle_check(e) and not shuffle_check(broken)
    assert not grouplike_check(broken)
    assert grouplike_check(ChenSeries.identity(2, 3, (0, 0)))


def test_shuffle_counts():
    assert shuffle((1,), (2,)) == {(1, 2): 1, (2, 1): 1}
    assert sum(shuffle((1, 2), (3, 4, 5)).values()) == 10


def test_source_examples():
    e = chen_series(path((3,), (5,)), 3)
    assert source_eval(e, MPoly.var(1, 1, 3)) == 3
    assert source_eval(e, MPoly.const(1, 3, 7)) == 7
    p = path((3, 0), (5, 1), (2, 2))
    x1 = MPoly.var(1, 2, 3)
    assert source_eval(chen_series(p, 3), x1 * x1) == 9
    assert start_point(chen_series(p, 2)) == (3, 0)


def test_compose_examples():
    g, d = path((0, 0), (1, 0)), path((1, 0), (1, 1))
    eg, ed = chen_series(g, 3), chen_series(d, 3)
    assert compose(ed, eg) == chen_series(g.then(d), 3)
    assert compose(eg, ChenSeries.identity(2, 3, (0, 0))) == eg
    with pytest.raises(EndpointMismatch):
        compose(eg, ed)
    with pytest.raises(EndpointMismatch):
        d.then(g)


def test_json_roundtrip():
    e = chen_series(path((0, 0), (1, 2), (F(1, 2), 3)), 3)
    assert ChenSeries.from_json(e.to_json()) == e
    p = path((0, 0), (1, 2))
    assert PLPath.from_json(p.to_json()) == p


def test_transport_examples():
    seg = path((0, 0), (1, 0))
    E12 = MatPoly.elementary(1, 2, 2, 2, 4)
    c = Connection(2, 2, 4, (E12, MatPoly.zero(2, 2, 4)))
    want = ((F(1), F(1)), (F(0), F(1)))
    assert transport(chen_series(seg, 4), c) == want == picard_transport(seg, c, 4)
    zero = Connection.zero(2, 2, 4)
    assert transport(chen_series(SQUARE, 4), zero) == rat_identity(2) == picard_transport(SQUARE, zero, 4)
    with pytest.raises(DimensionMismatch):
        transport(chen_series(path((0,), (1,)), 3), zero)


def test_matrix_exp_nilpotent():
    n = ((0, 1, 2), (0, 0, 3), (0, 0, 0))
    assert matrix_exp_nilpotent(n) == ((1, 1, F(7, 2)), (0, 1, 3), (0, 0, 1))


@given(paths(2, 4))
def test_grouplike_and_shuffle(p):
    e = chen_series(p, 4)
    assert grouplike_check(e) and shuffle_check(e)
    assert start_point(e) == p.start


@given(paths(2, 3), st.integers(0, 10), st.integers(1, 4))
def test_subdivision_invariance(p, k, t):
    seg = k % len(p.segments())
    assert chen_series(p.subdivide(seg, F(t, 5)), 4) == chen_series(p, 4)


@given(paths(2, 3), points(2))
def test_backtracking_invariance(p, q):
    detour = path(p.end, q, p.end)
    assert chen_series(p.then(detour), 4) == chen_series(p, 4)
    assert chen_series(p.then(p.reversed()), 3) == ChenSeries.identity(2, 3, p.start)


@given(paths(3, 2), st.data())
def test_compose_is_concatenation(p, data):
    q = data.draw(paths(3, 2, start=p.end))
    assert compose(chen_series(q, 3), chen_series(p, 3)) == chen_series(p.then(q), 3)


@given(st.integers(0, 2**32))
def test_nilpotent_transport_is_product_of_exponentials(seed):
    rng = sampling.suite_rng(seed, "nilpotent")
    c = sampling.nilpotent_connection(rng, 2, 3, 3)
    p = sampling.path(rng, 2, 4)
    A = [a.constant() for a in c.A]
    t = transport(chen_series(p, 3), c)
    assert t == segment_exponentials(p, A)
    q = sampling.path(rng, 2, 2, start=p.end)
    assert transport(chen_series(p.then(q), 3), c) == rat_matmul(transport(chen_series(q, 3), c), t)


@given(connections(2, 2, 3, 2), paths(2, 2), st.integers(1, 3))
def test_transport_matches_picard(c, p, cap):
    assert transport(chen_series(p, cap), c) == picard_transport(p, c, cap)


@given(paths(2, 3), st.data())
def test_source_eval_is_start_value(p, data):
    from strategies import mpolys

    a = data.draw(mpolys(2, 4, 4))
    assert source_eval(chen_series(p, 4), a) == a.evaluate(p.start)
