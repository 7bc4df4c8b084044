"""Exact linear algebra over the coefficient field on top of ``DomainMatrix``.

Vectors are plain lists of domain elements and matrices are lists of rows.
"""

from __future__ import annotations

from typing import Sequence

from sympy.polys.matrices import DomainMatrix


def _matrix(rows: Sequence[Sequence], ncols: int, K) -> DomainMatrix:
    return DomainMatrix([list(r) for r in rows], (len(rows), ncols), K)


def _as_lists(M: DomainMatrix) -> list[list]:
    return [list(row) for row in M.to_ddm()]


def rank(rows: Sequence[Sequence], ncols: int, K) -> int:
    if not rows or ncols == 0:
        return 0
    return _matrix(rows, ncols, K).rank()


def rref(rows: Sequence[Sequence], ncols: int, K) -> tuple[list[list], tuple[int, ...]]:
    """Nonzero rows of the reduced row echelon form, and the pivot columns."""
    if not rows or ncols == 0:
        return [], ()
    R, pivots = _matrix(rows, ncols, K).rref()
    reduced = []
    for row, p in zip(_as_lists(R), pivots):
        lead = row[p]
        reduced.append(row if lead == K.one else [K.quo(a, lead) for a in row])
    return reduced, tuple(pivots)


def nullspace(rows: Sequence[Sequence], ncols: int, K) -> list[list]:
    """A basis of {v : A v = 0} for the matrix A given by its rows."""
    if ncols == 0:
        return []
    if not rows or all(not any(r) for r in rows):
        return [[K.one if i == j else K.zero for i in range(ncols)] for j in range(ncols)]
    reduced, pivots = rref(rows, ncols, K)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [K.zero] * ncols
        v[f] = K.one
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def transpose(rows: Sequence[Sequence], ncols: int) -> list[list]:
    return [[row[c] for row in rows] for c in range(ncols)]


def columns_to_rows(columns: Sequence[Sequence], nrows: int, K) -> list[list]:
    """Rows of the matrix whose columns are given."""
    return [[col[r] for col in columns] for r in range(nrows)] if columns else [[] for _ in range(nrows)]


def matvec(rows: Sequence[Sequence], v: Sequence, K) -> list:
    out = []
    for row in rows:
        acc = K.zero
        for a, b in zip(row, v):
            if a and b:
                acc += a * b
        out.append(acc)
    return out


class Span:
    """Row space kept in reduced echelon form, grown one vector at a time."""

    def __init__(self, K, dim: int, vectors: Sequence[Sequence] = ()):
        self.K = K
        self.dim = dim
        self.rows: list[list] = []
        self.pivots: list[int] = []
        if vectors:
            self.rows, pivots = rref(vectors, dim, K)
            self.pivots = list(pivots)

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence) -> list:
        K = self.K
        r = list(v)
        for row, p in zip(self.rows, self.pivots):
            c = r[p]
            if c:
                r = [a - c * b if b else a for a, b in zip(r, row)]
        return r

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def add(self, v: Sequence) -> bool:
        """Add v; returns whether the span grew."""
        r = self.reduce(v)
        p = next((i for i, a in enumerate(r) if a), None)
        if p is None:
            return False
        inv = self.K.quo(self.K.one, r[p])
        r = [a * inv for a in r]
        for k, row in enumerate(self.rows):
            c = row[p]
            if c:
                self.rows[k] = [a - c * b if b else a for a, b in zip(row, r)]
        self.rows.append(r)
        self.pivots.append(p)
        return True

    def complement(self) -> list[int]:
        """Coordinates not used as pivots; they index a basis of the quotient space."""
        used = set(self.pivots)
        return [c for c in range(self.dim) if c not in used]

    def quotient_coordinates(self, v: Sequence) -> list:
        r = self.reduce(v)
        return [r[c] for c in self.complement()]
