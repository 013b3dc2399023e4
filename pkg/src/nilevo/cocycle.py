"""Diagonal cocycles and annihilator extensions.

A diagonal form on an m-dimensional evolution algebra is stored as the
m-vector of its values on (e_i, e_i).  A V-valued cocycle with dim V = s is a
:class:`CocycleMatrix`: s such vectors, one per basis vector of V.

Coboundaries are the forms theta_f(e_i, e_i) = f(e_i^2), i.e. the column space
of the structure matrix.  Classes modulo coboundaries are represented by the
unique reduced representative produced by :meth:`CocycleSpaces.reduce`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .algebra import EvolutionAlgebra, annihilator, quotient_by_annihilator
from .certificate import IsoCertificate
from .errors import DimensionMismatchError
from .field import Field
from .linalg import Matrix, Subspace, Vector, is_zero, mat_vec, rank, rref, transpose

DiagonalForm = Vector


@dataclass(frozen=True)
class CocycleMatrix:
    field: Field
    base_dim: int
    cols: tuple[DiagonalForm, ...]

    def __post_init__(self):
        if any(len(c) != self.base_dim for c in self.cols):
            raise DimensionMismatchError("every column must have length base_dim")

    @classmethod
    def create(cls, field: Field, base_dim: int, cols: Sequence[Sequence]) -> "CocycleMatrix":
        return cls(field, base_dim, tuple(tuple(field(x) for x in c) for c in cols))

    @property
    def s(self) -> int:
        return len(self.cols)

    def row(self, i: int) -> Vector:
        return tuple(c[i] for c in self.cols)

    @property
    def rows(self) -> Matrix:
        return tuple(self.row(i) for i in range(self.base_dim))

    def __add__(self, other: "CocycleMatrix") -> "CocycleMatrix":
        F = self.field
        cols = tuple(tuple(F.add(a, b) for a, b in zip(c, d)) for c, d in zip(self.cols, other.cols))
        return CocycleMatrix(F, self.base_dim, cols)

    def to_json(self) -> dict:
        return {"base_dim": self.base_dim, "cols": [[self.field.to_str(x) for x in c] for c in self.cols]}

    @classmethod
    def from_json(cls, data: dict, field: Field) -> "CocycleMatrix":
        return cls.create(field, data["base_dim"], data["cols"])


@dataclass(frozen=True)
class CocycleSpaces:
    """Z, B and H = Z/B for one algebra.

    B is kept in echelon form with each pivot on the *last* nonzero
    coordinate.  Reducing kills the pivot coordinates, so the surviving
    ``complement`` coordinates are coordinates on H.
    """

    field: Field
    m: int
    b_basis: Matrix
    pivots: tuple[int, ...]
    complement: tuple[int, ...]

    @property
    def dim_b(self) -> int:
        return len(self.b_basis)

    @property
    def dim_h(self) -> int:
        return self.m - self.dim_b

    def reduce(self, theta: Sequence) -> DiagonalForm:
        F = self.field
        v = list(theta)
        for b, p in zip(self.b_basis, self.pivots):
            c = v[p]
            if c:
                v = [F.sub(x, F.mul(c, y)) for x, y in zip(v, b)]
        return tuple(v)

    def h_coords(self, theta: Sequence) -> Vector:
        v = self.reduce(theta)
        return tuple(v[i] for i in self.complement)

    def lift(self, coords: Sequence) -> DiagonalForm:
        v = [self.field.zero] * self.m
        for i, c in zip(self.complement, coords):
            v[i] = c
        return tuple(v)

    def h_basis(self) -> list[DiagonalForm]:
        F = self.field
        return [self.lift(tuple(F.one if k == j else F.zero for k in range(self.dim_h)))
                for j in range(self.dim_h)]

    def b_space(self) -> Subspace:
        return Subspace.span(self.field, self.m, self.b_basis)


def compute_spaces(E: EvolutionAlgebra) -> CocycleSpaces:
    F, m = E.field, E.dim
    # theta_f for f = j-th coordinate functional is column j of the structure matrix
    columns = transpose(E.matrix, m)
    rev, rev_pivots = rref(F, [tuple(reversed(c)) for c in columns], m)
    b_basis = tuple(tuple(reversed(r)) for r in rev)
    pivots = tuple(m - 1 - p for p in rev_pivots)
    complement = tuple(i for i in range(m) if i not in pivots)
    return CocycleSpaces(F, m, b_basis, pivots, complement)


def coboundary(E: EvolutionAlgebra, f: Sequence[Sequence]) -> CocycleMatrix:
    """theta_f for f: E -> V given as an s x m matrix (row j = j-th coordinate of f)."""
    F = E.field
    return CocycleMatrix(F, E.dim, tuple(mat_vec(F, E.matrix, fj) for fj in f))


def radical(theta: CocycleMatrix) -> tuple[int, ...]:
    """Indices i with theta(e_i, e_i) = 0."""
    return tuple(i for i in range(theta.base_dim) if is_zero(theta.row(i)))


def _check_base(E: EvolutionAlgebra, theta: CocycleMatrix) -> None:
    if theta.base_dim != E.dim:
        raise DimensionMismatchError(f"cocycle on dim {theta.base_dim}, algebra has dim {E.dim}")


def reduced_rank(spaces: CocycleSpaces, theta: CocycleMatrix) -> int:
    return rank(spaces.field, [spaces.h_coords(c) for c in theta.cols], spaces.dim_h)


def is_admissible(E: EvolutionAlgebra, spaces: CocycleSpaces, theta: CocycleMatrix) -> tuple[bool, Optional[str]]:
    """Whether theta may be used to build an extension without annihilator component.

    Returns ``(True, None)`` or ``(False, reason)`` where reason is
    ``"dependent"`` (columns linearly dependent modulo coboundaries) or
    ``"radical"`` (some annihilator basis vector lies in the radical).
    """
    _check_base(E, theta)
    if reduced_rank(spaces, theta) < theta.s:
        return False, "dependent"
    if set(radical(theta)) & set(annihilator(E).indices):
        return False, "radical"
    return True, None


def extend(E: EvolutionAlgebra, theta: CocycleMatrix) -> EvolutionAlgebra:
    """E_theta = E (+) V; the new basis vectors are appended after e_1..e_m."""
    _check_base(E, theta)
    F, s = E.field, theta.s
    rows = [E.matrix[i] + theta.row(i) for i in range(E.dim)]
    rows += [(F.zero,) * (E.dim + s) for _ in range(s)]
    return EvolutionAlgebra(F, tuple(rows))


def annihilator_of_extension(E: EvolutionAlgebra, theta: CocycleMatrix) -> Subspace:
    """(theta-radical meet ann(E)) (+) V, computed without building E_theta."""
    _check_base(E, theta)
    base = set(radical(theta)) & set(annihilator(E).indices)
    idx = sorted(base) + list(range(E.dim, E.dim + theta.s))
    return Subspace.coordinate(E.field, E.dim + theta.s, idx)


def has_annihilator_component(E: EvolutionAlgebra, spaces: CocycleSpaces, theta: CocycleMatrix) -> bool:
    """Whether E_theta splits off a 1-dimensional zero ideal, via dependence in H.

    Only valid when the radical of theta misses ann(E).
    """
    _check_base(E, theta)
    if set(radical(theta)) & set(annihilator(E).indices):
        raise ValueError("radical of theta meets ann(E)")
    return reduced_rank(spaces, theta) < theta.s


class Decomposition(NamedTuple):
    quotient: EvolutionAlgebra
    cocycle: CocycleMatrix
    certificate: IsoCertificate


def decompose(E: EvolutionAlgebra) -> Decomposition:
    """Write E as an annihilator extension of E/ann(E) by ann(E).

    The certificate maps extend(quotient, cocycle) onto E; it is the
    permutation that moves the annihilator basis vectors back into place.
    """
    F, n = E.field, E.dim
    Q, perm = quotient_by_annihilator(E)
    r = Q.dim
    keep, ann = perm[:r], perm[r:]
    theta = CocycleMatrix(F, r, tuple(tuple(E.matrix[i][a] for i in keep) for a in ann))
    P = tuple(tuple(F.one if perm[k] == row else F.zero for k in range(n)) for row in range(n))
    cert = IsoCertificate(P)
    if not cert.verify(extend(Q, theta), E):
        raise AssertionError("decomposition certificate failed to verify")
    return Decomposition(Q, theta, cert)


def coboundary_certificate(E: EvolutionAlgebra, theta: CocycleMatrix, f: Sequence[Sequence]) -> IsoCertificate:
    """sigma(x) = x + f(x_E): an isomorphism E_theta -> E_(theta + theta_f)."""
    F, m, s = E.field, E.dim, theta.s
    n = m + s
    P = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    for j in range(s):
        for i in range(m):
            P[m + j][i] = F(f[j][i])
    return IsoCertificate(tuple(tuple(r) for r in P))
