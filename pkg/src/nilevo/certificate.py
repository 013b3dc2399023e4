"""Basis-change matrices witnessing an isomorphism between two evolution algebras."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import EvolutionAlgebra, multiply
from .linalg import Matrix, inverse, is_invertible, mat_vec, transpose


def is_homomorphism(P: Matrix, E1: EvolutionAlgebra, E2: EvolutionAlgebra) -> bool:
    """P(e_i e_j) == P(e_i) P(e_j) for every pair of basis vectors of E1.

    Column i of P is the image of e_i.
    """
    F, m = E1.field, E1.dim
    cols = transpose(P, m)
    for i in range(m):
        for j in range(i, m):
            lhs = mat_vec(F, P, E1.matrix[i]) if i == j else (F.zero,) * E2.dim
            if multiply(E2, cols[i], cols[j]) != lhs:
                return False
    return True


def is_isomorphism(P: Matrix, E1: EvolutionAlgebra, E2: EvolutionAlgebra) -> bool:
    if E1.dim != E2.dim or len(P) != E1.dim:
        return False
    return is_invertible(E1.field, P) and is_homomorphism(P, E1, E2)


@dataclass(frozen=True)
class IsoCertificate:
    """An invertible P with P(x *1 y) = P(x) *2 P(y)."""

    matrix: Matrix

    def verify(self, E1: EvolutionAlgebra, E2: EvolutionAlgebra) -> bool:
        return is_isomorphism(self.matrix, E1, E2)

    def inverse(self, F) -> "IsoCertificate":
        return IsoCertificate(inverse(F, self.matrix))

    def to_json(self, F) -> list[list[str]]:
        return [[F.to_str(x) for x in row] for row in self.matrix]
