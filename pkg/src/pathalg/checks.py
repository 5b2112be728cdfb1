"""Randomized invariant suites shared by the CLI ``check`` command and the tests.

Each suite takes ``(n, cap, seed, samples)`` and returns a list of
:class:`CheckResult`, one per property.  Output order is fixed, so running
suites in parallel does not change what gets printed.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from . import sampling as smp
from .chen import (
    PLPath,
    chen_series,
    compose,
    grouplike_check,
    picard_orders,
    picard_transport,
    segment_exponentials,
    shuffle_check,
    source_eval,
    start_point,
    transport,
)
from .coeff import MatPoly, MPoly, VectorField, rat_matmul
from .connection import (
    bianchi_check,
    cov_deriv,
    curvature,
    gauge_apply,
    holonomy_eval,
    jets,
    radial_gauge,
    reconstruct,
    symmetrized_symbol,
)
from .errors import NotALieElement
from .expr import format_expr
from .freelie import expand_to_words, hall_basis, lie_normal_form, lyndon_words, witt_dim
from .homology import brute_generators, freeness_dims, generators, h1_basis_check, schur_dim
from .ncdiff import (
    AnchorFrame,
    NCOp,
    TensorOp,
    coassoc_sides,
    coproduct,
    counit,
    counit_left,
    counit_right,
    nc_comm,
    nc_normalize,
    smbl,
    symbol_mul,
    takeuchi_check,
)
from .palg import Bivector, PElem, anchor, c_map, nc_to_p, p_bracket, p_to_nc
from .parser import parse_expr


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: int = 0
    total: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total and self.total > 0

    def record(self, ok: bool, detail: str = "") -> None:
        self.total += 1
        if ok:
            self.passed += 1
        elif len(self.failures) < 3:
            self.failures.append(detail)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        text = f"{status} {self.suite}.{self.name} {self.passed}/{self.total}"
        if self.failures:
            text += " first failure: " + self.failures[0]
        return text

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "ok": self.ok,
            "passed": self.passed,
            "total": self.total,
            "failures": self.failures,
        }


class _Recorder:
    def __init__(self, suite: str):
        self.suite = suite
        self.results: dict[str, CheckResult] = {}

    def __call__(self, name: str, ok: bool, detail: str = "") -> None:
        if name not in self.results:
            self.results[name] = CheckResult(self.suite, name)
        self.results[name].record(bool(ok), detail)

    def out(self) -> list[CheckResult]:
        return list(self.results.values())


def _frames(rng, n: int, cap: int, k: int) -> AnchorFrame:
    """Coordinate frame on even samples, a random linear frame on odd ones."""
    return AnchorFrame.coordinate(n, cap) if k % 2 == 0 else smp.linear_frame(rng, n, cap)


def suite_coeff(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "coeff")
    rec = _Recorder("coeff")
    half = cap // 2
    for k in range(samples):
        a, b, c = (smp.mpoly(rng, n, cap, cap) for _ in range(3))
        rec("associativity", (a * b) * c == a * (b * c))
        rec("distributivity", a * (b + c) == a * b + a * c)
        rec("commutativity", a * b == b * a)
        big = 2 * cap
        rec("truncation_hom", (a.with_cap(big) * b.with_cap(big)).with_cap(cap) == a * b)
        i, j = rng.randint(1, n), rng.randint(1, n)
        rec("partials_commute", a.partial(i).partial(j) == a.partial(j).partial(i))
        v = smp.vector_field(rng, n, cap, 1)
        f, g = smp.mpoly(rng, n, cap, half), smp.mpoly(rng, n, cap, half)
        rec("leibniz", v.apply(f * g) == v.apply(f) * g + f * v.apply(g), f"v={v} f={f} g={g}")
        N = rng.randint(1, 3)
        A, B, C = (smp.matpoly(rng, N, n, cap, 1) for _ in range(3))
        rec("matrix_jacobi", (A.comm(B.comm(C)) + B.comm(C.comm(A)) + C.comm(A.comm(B))).is_zero())
    e12, e23, e13 = (MatPoly.elementary(i, j, 3, n, cap) for i, j in ((1, 2), (2, 3), (1, 3)))
    rec("elementary_comm", e12.comm(e23) == e13)
    return rec.out()


def suite_freelie(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "freelie")
    rec = _Recorder("freelie")
    for d in range(1, max(cap, 2) + 3):
        rec("lyndon_count", len(lyndon_words(n, d)) == witt_dim(n, d), f"n={n} d={d}")
    for _ in range(samples):
        d = rng.randint(1, max(cap, 2))
        basis = hall_basis(n, d)
        if not basis:
            continue
        coords = {h: smp.nonzero_rat(rng) for h in rng.sample(basis, min(len(basis), 3))}
        words: dict = {}
        for h, c in coords.items():
            for w, m in expand_to_words(h).items():
                words[w] = words.get(w, 0) + c * m
        rec("normal_form_roundtrip", lie_normal_form(words, d) == coords)
    if n >= 2:
        try:
            lie_normal_form({(1, 2): Fraction(1)}, 2)
            rec("rejects_non_lie", False, "D1*D2 accepted as a Lie element")
        except NotALieElement:
            rec("rejects_non_lie", True)
    return rec.out()


def suite_algebra(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "algebra")
    rec = _Recorder("algebra")
    cdeg = cap // 3
    for k in range(samples):
        frame = _frames(rng, n, cap, k)
        p, q, r = (smp.ncop(rng, frame, 4, cdeg) for _ in range(3))
        rec("associativity", (p * q) * r == p * (q * r), f"P={p} Q={q} R={r}")
        jac = nc_comm(nc_comm(p, q), r) + nc_comm(nc_comm(q, r), p) + nc_comm(nc_comm(r, p), q)
        rec("jacobi", not jac)
        rec("counit_twisted", counit(p * q) == counit(p * NCOp.function(frame, counit(q))))
        pq = p * q
        rec("degree_bound", pq.degree() <= p.degree() + q.degree())
        if p and q:
            dp, dq = p.degree(), q.degree()
            rec("top_symbol", smbl(pq, dp + dq) == symbol_mul(smbl(p, dp), smbl(q, dq)))
    frame = AnchorFrame.coordinate(n, cap)
    x1 = MPoly.var(1, n, cap)
    rec("unit_relation", NCOp.generator(frame, 1) * x1 == NCOp(frame, {(1,): x1, (): 1}))
    return rec.out()


def suite_rewrite(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "rewrite")
    rec = _Recorder("rewrite")
    for k in range(samples):
        frame = _frames(rng, n, cap, k)
        while True:
            e = smp.opexpr(rng, n, 3, cap)
            if smp.var_degree(e) <= cap:
                break
        left = nc_normalize(e, frame, "leftmost")
        right = nc_normalize(e, frame, "rightmost")
        alg = nc_normalize(e, frame, "algebraic")
        rec("confluence", left == right, format_expr(e))
        rec("matches_algebraic", left == alg, format_expr(e))
        rec("print_parse_roundtrip", nc_normalize(parse_expr(format_expr(e), n), frame) == alg, format_expr(e))
        if frame.is_coordinate:
            rec("normal_form_reparses", nc_normalize(parse_expr(str(alg), n), frame) == alg, str(alg))
    return rec.out()


def suite_bialgebra(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "bialgebra")
    rec = _Recorder("bialgebra")
    frame = AnchorFrame.coordinate(n, cap)
    ops = [NCOp.word(frame, w) for d in range(5) for w in product(range(1, n + 1), repeat=d)]
    ops += [smp.ncop(rng, frame, 3, cap // 2) for _ in range(samples)]
    for p in ops:
        dp = coproduct(p)
        left, right = coassoc_sides(p)
        rec("coassociativity", left == right, str(p))
        rec("counit_left", counit_left(dp) == p, str(p))
        rec("counit_right", counit_right(dp) == p, str(p))
        rec("takeuchi", takeuchi_check(dp, 3), str(p))
    for _ in range(samples):
        p, q = smp.ncop(rng, frame, 2, cap // 2), smp.ncop(rng, frame, 2, cap // 2)
        rec("multiplicative", coproduct(p * q) == coproduct(p) * coproduct(q), f"P={p} Q={q}")
    if n >= 2 and cap >= 1:
        bad = TensorOp(frame, {((1,), (2,)): 1})
        rec("takeuchi_rejects", not takeuchi_check(bad, 1))
    return rec.out()


def suite_algebroid(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "algebroid")
    rec = _Recorder("algebroid")
    frame = AnchorFrame.coordinate(n, cap)
    cdeg = cap // 3
    for _ in range(samples):
        x, y, z = (smp.pelem(rng, frame, 3, cdeg) for _ in range(3))
        f = smp.mpoly(rng, n, cap, cdeg)
        xy = p_bracket(x, y)
        rec("roundtrip", nc_to_p(p_to_nc(x)) == x, str(x))
        rec("antisymmetry", xy == -p_bracket(y, x))
        jac = p_bracket(xy, z) + p_bracket(p_bracket(y, z), x) + p_bracket(p_bracket(z, x), y)
        rec("jacobi", not jac, f"x={x} y={y} z={z}")
        rinehart = p_bracket(x, y.lmul(f)) - xy.lmul(f) - y.lmul(anchor(x).apply(f))
        rec("rinehart", not rinehart, f"x={x} y={y} f={f}")
        rec("anchor_morphism", anchor(xy) == anchor(x).bracket(anchor(y)), f"x={x} y={y}")
        p, q = rng.randint(1, 3), rng.randint(2, 3)
        if not hall_basis(n, p) or not hall_basis(n, q):
            continue
        u = smp.homogeneous_pelem(rng, frame, p, cdeg)
        v = smp.homogeneous_pelem(rng, frame, q, cdeg)
        allowed = {p + q} if p >= 2 else {q, q + 1}
        rec("grading", p_bracket(u, v).degrees() <= allowed, f"p={p} q={q} u={u} v={v}")
    if n >= 2:
        b = Bivector.from_dict(n, cap, {(1, 2): MPoly.var(1, n, cap) if cap >= 1 else MPoly.one(n, cap)})
        img = c_map(b)
        rec("c_map_level2", img.degrees() <= {2})
    return rec.out()


def suite_curvature(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "curvature")
    rec = _Recorder("curvature")
    nb = max(n, 3)  # the cyclic sum is empty below three variables
    frame = AnchorFrame.coordinate(n, cap)
    for _ in range(samples):
        c3 = smp.connection(rng, nb, 2, cap, min(3, cap))
        rec("bianchi", bianchi_check(c3))
        table = {(i, j): curvature(c3, i, j) for i in range(1, nb + 1) for j in range(i + 1, nb + 1)}
        bump = MatPoly.from_constant(smp.strictly_upper(rng, 2), nb, cap) + MatPoly.identity(2, nb, cap)
        table[(1, 2)] = table[(1, 2)] + bump * MPoly.var(3, nb, cap)
        rec("bianchi_detects_corruption", not bianchi_check(c3, table))
        c = smp.connection(rng, n, 2, cap, min(2, cap))
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                b = Bivector.from_dict(n, cap, {(i, j): MPoly.one(n, cap)})
                op = holonomy_eval(c_map(b), c)
                rec("holonomy_of_c", op.endomorphism() == curvature(c, i, j), f"i={i} j={j}")
        m1, m2 = smp.matpoly(rng, 2, n, cap, cap // 2), smp.matpoly(rng, 2, n, cap, cap // 2)
        i = rng.randint(1, n)
        rec("cov_leibniz", cov_deriv(c, i, m1 * m2) == cov_deriv(c, i, m1) * m2 + m1 * cov_deriv(c, i, m2))
        # representation property: stay within exact degrees
        ca = smp.connection(rng, n, 2, cap, 1 if cap >= 4 else 0)
        x, y = smp.pelem(rng, frame, 2, 0, 2), smp.pelem(rng, frame, 2, 0, 2)
        hx, hy = holonomy_eval(x, ca), holonomy_eval(y, ca)
        rec("holonomy_bracket", holonomy_eval(p_bracket(x, y), ca) == hx.compose(hy) - hy.compose(hx), f"x={x} y={y}")
        # gauge covariance of curvature, exact through degree cap - 1
        g = smp.restricted_gauge(rng, n, 2, cap, cap)
        cg = gauge_apply(g, c)
        gw = g.g.with_cap(cap + 1)
        ginv = gw.inverse()
        lifted = c.with_cap(cap + 1)
        ok = True
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                want = (ginv * curvature(lifted, i, j) * gw).truncate(cap - 1).with_cap(cap)
                ok &= curvature(cg, i, j).truncate(cap - 1) == want
        rec("gauge_conjugates_curvature", ok)
        h = smp.restricted_gauge(rng, n, 2, cap, cap)
        gh = g.g.with_cap(cap + 1) * h.g.with_cap(cap + 1)
        rec("gauge_composition", gauge_apply(h, gauge_apply(g, c)) == gauge_apply(gh, c))
    return rec.out()


def suite_taylor(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "taylor")
    rec = _Recorder("taylor")
    if cap < 1:
        return [CheckResult("taylor", "needs_cap_1", 0, 1, ["cap must be at least 1"])]
    dmax = min(4, cap + 1)
    for _ in range(samples):
        c = smp.connection(rng, n, 2, cap, min(2, cap), 0.4)
        j = jets(c, dmax)
        r = reconstruct(j, cap)
        rec("reconstruct_roundtrip", jets(r, dmax) == j)
        rec("reconstruct_is_radial", r.radial_residual().is_zero())
        g = smp.restricted_gauge(rng, n, 2, cap, cap)
        rec("gauge_invariance", jets(gauge_apply(g, c), dmax) == j)
        rad, gr = radial_gauge(c)
        rec("radial_condition", rad.radial_residual().is_zero() and gr.restricted)
        rec("radial_is_gauge", gauge_apply(gr, c) == rad and jets(rad, dmax) == j)
        rec("radial_uniqueness", _trunc_eq(r, rad, dmax - 1))
        if n >= 2:  # one variable has no curvature, so nothing to separate
            other = smp.connection(rng, n, 2, cap, min(2, cap), 0.4)
            rec("jets_separate", jets(other, dmax) != j or other == c)
    return rec.out()


def _trunc_eq(a, b, deg: int) -> bool:
    return all((x - y).truncate(deg).is_zero() for x, y in zip(a.A, b.A))


def suite_homology(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rec = _Recorder("homology")
    dtop = min(max(cap + 2, 3), 7)
    for d in range(2, dtop + 1):
        gens = generators(n, d)
        rec("enumeration", gens == brute_generators(n, d), f"d={d}")
        if n >= 2:
            rec("schur_count", len(gens) == schur_dim(n, d), f"d={d}")
        if n <= 3 and d <= 6:
            rec("h1_basis", h1_basis_check(n, d), f"d={d}")
    for row in freeness_dims(n, dtop):
        rec("freeness", row["fl_dim"] == row["free_graded_dim"], str(row))
    return rec.out()


def suite_chen(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "chen")
    rec = _Recorder("chen")
    ecap = max(cap, 1)
    for _ in range(samples):
        p = smp.path(rng, n, 5)
        e = chen_series(p, ecap)
        rec("grouplike", grouplike_check(e), str(p.points))
        rec("shuffle", shuffle_check(e))
        rec("source_is_start", start_point(e) == p.start)
        seg = rng.randrange(len(p.points) - 1)
        rec("subdivision", chen_series(p.subdivide(seg, Fraction(rng.randint(1, 4), 5)), ecap) == e)
        detour = PLPath((p.end, smp.point(rng, n), p.end))
        rec("backtracking", chen_series(p.then(detour), ecap) == e)
        q = smp.path(rng, n, 3, start=p.end)
        s = smp.path(rng, n, 2, start=q.end)
        eq, es = chen_series(q, ecap), chen_series(s, ecap)
        rec("compose", compose(eq, e) == chen_series(p.then(q), ecap))
        rec("compose_assoc", compose(es, compose(eq, e)) == compose(compose(es, eq), e))
        if n >= 2 and ecap >= 2:
            u = (rng.randint(1, n),)
            v = (rng.randint(1, n),)
            broken = e.with_value(u + v, e[u + v] + 1)
            rec("grouplike_rejects", not grouplike_check(broken))
    if n >= 2 and ecap >= 2:
        zero = (0,) * (n - 2)
        loop = PLPath(((0, 0) + zero, (1, 0) + zero, (1, 1) + zero, (0, 1) + zero, (0, 0) + zero))
        e = chen_series(loop, ecap)
        rec("square_loop", e[(1,)] == 0 and e[(2,)] == 0 and e[(1, 2)] + e[(2, 1)] == 0 and abs(e[(1, 2)]) == 1)
    return rec.out()


def suite_transport(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "transport")
    rec = _Recorder("transport")
    ncap = max(cap, 2)
    for _ in range(samples):
        cn = smp.nilpotent_connection(rng, n, 3, ncap)
        A = [a.constant() for a in cn.A]
        p = smp.path(rng, n, 4)
        t = transport(chen_series(p, ncap), cn)
        rec("nilpotent_exponential", t == segment_exponentials(p, A), str(p.points))
        rec("nilpotent_picard", picard_transport(p, cn, ncap) == t)
        q = smp.path(rng, n, 3, start=p.end)
        tq = transport(chen_series(q, ncap), cn)
        rec("functorial", transport(chen_series(p.then(q), ncap), cn) == rat_matmul(tq, t))
        c = smp.connection(rng, n, 2, max(cap, 1), min(2, max(cap, 1)), 0.4)
        short = smp.path(rng, n, 2)
        k = max(cap, 1)
        rec("picard_agreement", transport(chen_series(short, k), c) == picard_transport(short, c, k), str(short.points))
        rec("picard_cap_stable", picard_orders(short, c, k + 1)[: k + 1] == picard_orders(short, c, k))
        e = chen_series(p, max(cap, 1))
        a = smp.mpoly(rng, n, max(cap, 1), max(cap, 1))
        rec("source_eval", source_eval(e, a) == a.evaluate(p.start))
    return rec.out()


def suite_symbol(n: int, cap: int, seed: int, samples: int) -> list[CheckResult]:
    rng = smp.suite_rng(seed, "symbol")
    rec = _Recorder("symbol")
    frame = AnchorFrame.coordinate(n, cap)
    for _ in range(samples):
        p = smp.ncop(rng, frame, 3, cap // 2)
        if not p:
            continue
        d = p.degree()
        want = symmetrized_symbol(smbl(p, d), n)
        tops = []
        for _ in range(2):
            c = smp.connection(rng, n, 2, cap, min(1, cap))
            top = holonomy_eval(p, c).part(d)
            ident = MatPoly.identity(2, n, cap)
            tops.append(top)
            rec("top_symbol", top == {a: ident * f for a, f in want.items()}, str(p))
        rec("independent_of_connection", tops[0] == tops[1])
    return rec.out()


SUITES: dict[str, Callable[[int, int, int, int], list[CheckResult]]] = {
    "coeff": suite_coeff,
    "freelie": suite_freelie,
    "algebra": suite_algebra,
    "rewrite": suite_rewrite,
    "bialgebra": suite_bialgebra,
    "algebroid": suite_algebroid,
    "curvature": suite_curvature,
    "taylor": suite_taylor,
    "homology": suite_homology,
    "chen": suite_chen,
    "transport": suite_transport,
    "symbol": suite_symbol,
}


def _run_one(args: tuple[str, int, int, int, int]) -> list[CheckResult]:
    name, n, cap, seed, samples = args
    return SUITES[name](n, cap, seed, samples)


def run_suites(names: list[str], n: int, cap: int, seed: int, samples: int, jobs: int = 1) -> list[CheckResult]:
    tasks = [(name, n, cap, seed, samples) for name in names]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_one, tasks))
    else:
        chunks = [_run_one(t) for t in tasks]
    return [r for chunk in chunks for r in chunk]
