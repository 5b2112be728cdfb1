"""Sparse exact linear algebra over Q (rank, membership, square solves)."""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import NotInvertible

Row = dict[Hashable, Fraction]


class Echelon:
    """Incremental row-echelon basis of a subspace of Q^(keys).

    Rows are dicts ``key -> Fraction``; pivots are chosen as the minimal key of
    each reduced row, so results do not depend on insertion order of the keys
    inside a row.
    """

    def __init__(self):
        self.pivots: dict[Hashable, Row] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping[Hashable, Fraction]) -> Row:
        r = {k: Fraction(v) for k, v in row.items() if v}
        # pivot rows are fully reduced, so one pass over pivot columns suffices
        for k in [k for k in r if k in self.pivots]:
            f = r.pop(k, None)
            if not f:
                continue
            for kk, vv in self.pivots[k].items():
                if kk == k:
                    continue
                s = r.get(kk, 0) - f * vv
                if s:
                    r[kk] = s
                else:
                    r.pop(kk, None)
        return r

    def add(self, row: Mapping[Hashable, Fraction]) -> bool:
        """Insert a row; returns False if it was already in the span."""
        r = self.reduce(row)
        if not r:
            return False
        k = min(r)
        p = r[k]
        r = {kk: v / p for kk, v in r.items()}
        # keep existing pivot rows free of the new pivot column
        for key, prow in self.pivots.items():
            f = prow.get(k)
            if f:
                for kk, vv in r.items():
                    s = prow.get(kk, 0) - f * vv
                    if s:
                        prow[kk] = s
                    else:
                        prow.pop(kk, None)
        self.pivots[k] = r
        return True

    def contains(self, row: Mapping[Hashable, Fraction]) -> bool:
        return not self.reduce(row)


def rank(rows: Iterable[Mapping[Hashable, Fraction]]) -> int:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Solve ``matrix @ X = rhs`` exactly for a full-column-rank system.

    ``matrix`` is m x k with m >= k, ``rhs`` is m x r.  Raises NotInvertible
    when the columns are dependent or the system is inconsistent.
    """
    m = len(matrix)
    k = len(matrix[0]) if m else 0
    r = len(rhs[0]) if rhs else 0
    aug = [[Fraction(x) for x in matrix[i]] + [Fraction(x) for x in rhs[i]] for i in range(m)]
    row = 0
    for col in range(k):
        piv = next((i for i in range(row, m) if aug[i][col]), None)
        if piv is None:
            raise NotInvertible(f"linear system is rank deficient at column {col}")
        aug[row], aug[piv] = aug[piv], aug[row]
        p = aug[row][col]
        aug[row] = [x / p for x in aug[row]]
        for i in range(m):
            if i != row and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        row += 1
    for i in range(k, m):
        if any(aug[i][k:]):
            raise NotInvertible("linear system is inconsistent")
    return [aug[i][k:k + r] for i in range(k)]
