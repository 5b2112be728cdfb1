"""Generators of the degree >= 2 part of the free Lie algebra.

The left-nested brackets ``[z_i1, [z_i2, ... [z_i(d-1), z_id]...]]`` with
``i1 >= i2 >= ... >= i(d-1) < id`` are checked to project onto a basis of
``FL_d / [FL>=2, FL>=2]_d`` and their counts are compared with two
independent numbers: hook-shape semistandard tableaux and the free Lie
algebra on graded generators.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product

from .freelie import Tree, Word, expand_to_words, hall_basis, word_comm, witt_dim
from .linalg import Echelon

GenSeq = tuple[int, ...]


def is_gen_seq(seq: GenSeq, n: int) -> bool:
    d = len(seq)
    if d < 2 or any(not 1 <= i <= n for i in seq):
        return False
    head = seq[:-1]
    return all(head[k] >= head[k + 1] for k in range(len(head) - 1)) and seq[-2] < seq[-1]


@lru_cache(maxsize=None)
def generators(n: int, d: int) -> tuple[GenSeq, ...]:
    """All index sequences of length d obeying the pattern, in lex order."""
    if d < 2:
        return ()
    out = []
    # choose the weakly decreasing head as a multiset, then the strictly larger last index
    for head in combinations_with_replacement(range(n, 0, -1), d - 1):
        for last in range(head[-1] + 1, n + 1):
            out.append(head + (last,))
    return tuple(sorted(out))


def left_nested(seq: GenSeq) -> Tree:
    t: Tree = seq[-1]
    for i in reversed(seq[:-1]):
        t = (i, t)
    return t


def schur_dim(n: int, d: int) -> int:
    """Count semistandard tableaux of hook shape (d-1, 1) with entries in 1..n."""
    count = 0
    for row in combinations_with_replacement(range(1, n + 1), d - 1):
        for below in range(1, n + 1):
            if below > row[0]:
                count += 1
    return count


def _bracket_span_rows(n: int, d: int) -> list[dict[Word, Fraction]]:
    """Word vectors spanning [FL>=2, FL>=2] in degree d."""
    rows = []
    for p in range(2, d // 2 + 1):
        q = d - p
        if q < 2:
            continue
        left = [expand_to_words(h) for h in hall_basis(n, p)]
        right = [expand_to_words(h) for h in hall_basis(n, q)]
        for a_idx, a in enumerate(left):
            for b_idx, b in enumerate(right):
                if p == q and b_idx <= a_idx:
                    continue
                rows.append(word_comm(a, b))
    return rows


def h1_basis_check(n: int, d: int) -> bool:
    """Generators of degree d project to a basis of FL_d modulo [FL>=2, FL>=2]_d."""
    if d < 2:
        return False
    ech = Echelon()
    for r in _bracket_span_rows(n, d):
        ech.add(r)
    quotient_dim = witt_dim(n, d) - ech.rank
    gens = generators(n, d)
    if len(gens) != quotient_dim or len(gens) != schur_dim(n, d):
        return False
    for g in gens:
        if not ech.add(expand_to_words(left_nested(g))):
            return False
    return ech.rank == witt_dim(n, d)


def graded_free_lie_dims(gen_counts: dict[int, int], dmax: int) -> dict[int, int]:
    """Graded dimensions of the free Lie algebra on g_d generators in degree d.

    Uses PBW: prod_d (1 - t^d)^(-L_d) = 1 / (1 - sum_d g_d t^d).  Taking logs,
    sum_{e | N} e L_e = N c_N with c_N the coefficients of -log(1 - G(t)).
    """
    # power series of G(t)^m / m summed over m
    g = [Fraction(0)] * (dmax + 1)
    for k, v in gen_counts.items():
        if 1 <= k <= dmax:
            g[k] = Fraction(v)
    c = [Fraction(0)] * (dmax + 1)
    power = [Fraction(1)] + [Fraction(0)] * dmax
    for m in range(1, dmax + 1):
        nxt = [Fraction(0)] * (dmax + 1)
        for i, a in enumerate(power):
            if a:
                for j in range(1, dmax + 1 - i):
                    if g[j]:
                        nxt[i + j] += a * g[j]
        power = nxt
        for k in range(dmax + 1):
            c[k] += power[k] / m
    dims: dict[int, int] = {}
    for big_n in range(1, dmax + 1):
        acc = big_n * c[big_n] - sum(e * dims[e] for e in range(1, big_n) if big_n % e == 0)
        val = acc / big_n
        if val.denominator != 1:
            raise ArithmeticError(f"non-integral graded dimension at degree {big_n}")
        dims[big_n] = int(val)
    return dims


def freeness_dims(n: int, dmax: int) -> list[dict]:
    """Rows {d, gen_count, schur_dim, fl_dim, free_graded_dim} for d = 2..dmax."""
    counts = {d: len(generators(n, d)) for d in range(2, dmax + 1)}
    free = graded_free_lie_dims(counts, dmax)
    rows = []
    for d in range(2, dmax + 1):
        rows.append(
            {
                "d": d,
                "gen_count": counts[d],
                "schur_dim": schur_dim(n, d) if n >= 2 else 0,
                "fl_dim": witt_dim(n, d),
                "free_graded_dim": free[d],
            }
        )
    return rows


def brute_generators(n: int, d: int) -> tuple[GenSeq, ...]:
    """Exhaustive filter over all n^d sequences (test oracle)."""
    return tuple(s for s in product(range(1, n + 1), repeat=d) if is_gen_seq(s, n))
