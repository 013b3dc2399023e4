"""Dense exact linear algebra over a :class:`~nilevo.field.Field`.

Vectors and matrices are tuples (of tuples) of field elements.  Matrices are
row-major.  When a matrix represents a linear map, column ``i`` holds the
image of the ``i``-th basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .field import Element, Field

Vector = tuple
Matrix = tuple


def zero_vector(F: Field, n: int) -> Vector:
    return (F.zero,) * n


def unit_vector(F: Field, n: int, i: int) -> Vector:
    return tuple(F.one if k == i else F.zero for k in range(n))


def identity(F: Field, n: int) -> Matrix:
    return tuple(unit_vector(F, n, i) for i in range(n))


def is_zero(v: Sequence[Element]) -> bool:
    return all(x == 0 for x in v)


def transpose(M: Sequence[Sequence[Element]], ncols: int | None = None) -> Matrix:
    if not M:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*M))


def vec_add(F: Field, u: Sequence[Element], v: Sequence[Element]) -> Vector:
    return tuple(F.add(a, b) for a, b in zip(u, v))


def vec_scale(F: Field, c: Element, v: Sequence[Element]) -> Vector:
    return tuple(F.mul(c, a) for a in v)


def mat_vec(F: Field, M: Sequence[Sequence[Element]], v: Sequence[Element]) -> Vector:
    out = []
    for row in M:
        acc = F.zero
        for a, b in zip(row, v):
            if a and b:
                acc = F.add(acc, F.mul(a, b))
        out.append(acc)
    return tuple(out)


def mat_mul(F: Field, A: Sequence[Sequence[Element]], B: Sequence[Sequence[Element]]) -> Matrix:
    if not A:
        return ()
    Bt = transpose(B, len(B[0]) if B else 0)
    return tuple(tuple(_dot(F, row, col) for col in Bt) for row in A)


def _dot(F: Field, u, v) -> Element:
    acc = F.zero
    for a, b in zip(u, v):
        if a and b:
            acc = F.add(acc, F.mul(a, b))
    return acc


def rref(F: Field, rows: Iterable[Sequence[Element]], ncols: int) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row-echelon form.  Returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = F.inv(work[r][c])
        work[r] = [F.mul(inv, x) for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in work[:r]), tuple(pivots)


def rank(F: Field, rows: Iterable[Sequence[Element]], ncols: int) -> int:
    return len(rref(F, rows, ncols)[1])


def inverse(F: Field, M: Sequence[Sequence[Element]]) -> Matrix:
    n = len(M)
    aug = [tuple(M[i]) + unit_vector(F, n, i) for i in range(n)]
    R, pivots = rref(F, aug, 2 * n)
    if pivots != tuple(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(row[n:] for row in R)


def is_invertible(F: Field, M: Sequence[Sequence[Element]]) -> bool:
    return rank(F, M, len(M)) == len(M)


def nullspace(F: Field, M: Sequence[Sequence[Element]], ncols: int) -> list[Vector]:
    """Basis of {x : M x = 0}."""
    R, pivots = rref(F, M, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [F.zero] * ncols
        x[f] = F.one
        for row, p in zip(R, pivots):
            x[p] = F.neg(row[f])
        basis.append(tuple(x))
    return basis


@dataclass(frozen=True)
class Subspace:
    """A subspace of F^ambient stored by its reduced row-echelon basis."""

    field: Field
    ambient: int
    basis: Matrix

    @classmethod
    def span(cls, F: Field, ambient: int, vectors: Iterable[Sequence[Element]]) -> "Subspace":
        R, _ = rref(F, vectors, ambient)
        return cls(F, ambient, R)

    @classmethod
    def coordinate(cls, F: Field, ambient: int, indices: Iterable[int]) -> "Subspace":
        return cls.span(F, ambient, [unit_vector(F, ambient, i) for i in sorted(indices)])

    @classmethod
    def whole(cls, F: Field, ambient: int) -> "Subspace":
        return cls.coordinate(F, ambient, range(ambient))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v) -> bool:
        return rank(self.field, self.basis + (tuple(v),), self.ambient) == self.dim

    def __le__(self, other: "Subspace") -> bool:
        return all(v in other for v in self.basis)

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.field, self.ambient, self.basis + other.basis)

    def intersection_dim(self, other: "Subspace") -> int:
        return self.dim + other.dim - self.sum(other).dim

    def __repr__(self) -> str:
        rows = ", ".join("(" + ",".join(str(x) for x in r) + ")" for r in self.basis)
        return f"Subspace<{rows}>"
