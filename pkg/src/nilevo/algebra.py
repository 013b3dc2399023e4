"""Evolution algebras given by a structure matrix in a natural basis.

Row ``i`` of the structure matrix holds the coordinates of ``e_i^2``; products
of distinct basis vectors vanish, so the matrix determines the multiplication.
"""

from __future__ import annotations

import graphlib
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

from .errors import DimensionMismatchError, InternalConsistencyError
from .field import Element, Field, elements
from .linalg import Matrix, Subspace, Vector, inverse, is_zero, mat_vec, rank, transpose, unit_vector


@dataclass(frozen=True)
class EvolutionAlgebra:
    field: Field
    matrix: Matrix

    def __post_init__(self):
        m = len(self.matrix)
        if any(len(row) != m for row in self.matrix):
            raise DimensionMismatchError("structure matrix must be square")

    @classmethod
    def create(cls, field: Field, rows: Sequence[Sequence]) -> "EvolutionAlgebra":
        return cls(field, tuple(tuple(field(x) for x in row) for row in rows))

    @classmethod
    def zero(cls, field: Field, dim: int) -> "EvolutionAlgebra":
        return cls(field, tuple((field.zero,) * dim for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def square(self, i: int) -> Vector:
        return self.matrix[i]

    def table(self) -> str:
        """Nonzero products, e.g. ``e1^2 = e2 + 2e3``; 1-based labels."""
        parts = []
        for i, row in enumerate(self.matrix):
            terms = []
            for j, a in enumerate(row):
                if a == 0:
                    continue
                coeff = "" if a == 1 else ("-" if a == -1 else str(a))
                terms.append(f"{coeff}e{j + 1}")
            if terms:
                parts.append(f"e{i + 1}^2 = " + " + ".join(terms))
        return ", ".join(parts) if parts else "(all products zero)"

    def to_json(self) -> dict:
        return {
            "field": str(self.field),
            "dim": self.dim,
            "matrix": [[self.field.to_str(x) for x in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EvolutionAlgebra":
        F = Field.parse(data["field"])
        E = cls.create(F, data["matrix"])
        if E.dim != data["dim"]:
            raise DimensionMismatchError(f"declared dim {data['dim']} but matrix is {E.dim}x{E.dim}")
        return E


def multiply(E: EvolutionAlgebra, x: Sequence[Element], y: Sequence[Element]) -> Vector:
    """x*y = sum_i x_i y_i e_i^2."""
    if len(x) != E.dim or len(y) != E.dim:
        raise DimensionMismatchError("vector length does not match algebra dimension")
    F = E.field
    out = [F.zero] * E.dim
    for xi, yi, row in zip(x, y, E.matrix):
        c = F.mul(xi, yi)
        if c == 0:
            continue
        for j, a in enumerate(row):
            if a:
                out[j] = F.add(out[j], F.mul(c, a))
    return tuple(out)


class Annihilator(NamedTuple):
    space: Subspace
    indices: tuple[int, ...]


def annihilator(E: EvolutionAlgebra) -> Annihilator:
    idx = tuple(i for i, row in enumerate(E.matrix) if is_zero(row))
    return Annihilator(Subspace.coordinate(E.field, E.dim, idx), idx)


def power_chain(E: EvolutionAlgebra) -> list[Subspace]:
    """E^<1> = E, E^<k+1> = E^<k> E, until the chain hits 0 or stops shrinking.

    The last entry is either the zero space or the nonzero space at which the
    chain stabilizes (it is not repeated).
    """
    F, m = E.field, E.dim
    basis = [unit_vector(F, m, j) for j in range(m)]
    current = Subspace.whole(F, m)
    chain = [current]
    for _ in range(m + 1):
        if current.dim == 0:
            break
        products = [multiply(E, x, y) for x in current.basis for y in basis]
        nxt = Subspace.span(F, m, products)
        if nxt == current:
            break
        chain.append(nxt)
        current = nxt
    return chain


def nilpotency_index(E: EvolutionAlgebra) -> Optional[int]:
    """Least n with E^<n> = 0, or None if the algebra is not nilpotent."""
    chain = power_chain(E)
    return len(chain) if chain[-1].dim == 0 else None


def _acyclic(E: EvolutionAlgebra) -> bool:
    graph = {i: {j for j, a in enumerate(row) if a != 0} for i, row in enumerate(E.matrix)}
    try:
        graphlib.TopologicalSorter(graph).prepare()
    except graphlib.CycleError:
        return False
    return True


def nilpotency_criteria(E: EvolutionAlgebra) -> tuple[bool, bool]:
    """(power chain reaches 0, digraph i->j for a_ij != 0 is acyclic)."""
    return power_chain(E)[-1].dim == 0, _acyclic(E)


def is_nilpotent(E: EvolutionAlgebra) -> bool:
    by_chain, by_graph = nilpotency_criteria(E)
    if by_chain != by_graph:
        raise InternalConsistencyError(
            f"chain criterion says {by_chain}, graph criterion says {by_graph} for {E.matrix}"
        )
    return by_chain


def quotient_by_annihilator(E: EvolutionAlgebra) -> tuple[EvolutionAlgebra, tuple[int, ...]]:
    """E/ann(E) on the surviving basis vectors, plus the basis order used.

    The returned permutation lists the non-annihilator indices in their
    original order followed by the annihilator indices.
    """
    ann = annihilator(E).indices
    if not ann:
        raise ValueError("annihilator is zero")
    keep = [i for i in range(E.dim) if i not in ann]
    Q = EvolutionAlgebra(E.field, tuple(tuple(E.matrix[i][j] for j in keep) for i in keep))
    return Q, tuple(keep) + ann


def rebase(E: EvolutionAlgebra, P: Sequence[Sequence[Element]]) -> EvolutionAlgebra:
    """E written in the basis formed by the columns of P.

    The columns must be pairwise orthogonal for the product (a natural
    basis); otherwise the result would not be an evolution algebra.
    """
    F, m = E.field, E.dim
    Pinv = inverse(F, P)
    cols = transpose(P, m)
    for i in range(m):
        for j in range(i + 1, m):
            if not is_zero(multiply(E, cols[i], cols[j])):
                raise ValueError(f"basis vectors {i + 1} and {j + 1} have a nonzero product")
    return EvolutionAlgebra(F, tuple(mat_vec(F, Pinv, multiply(E, c, c)) for c in cols))


def direct_sum(E1: EvolutionAlgebra, E2: EvolutionAlgebra) -> EvolutionAlgebra:
    if E1.field != E2.field:
        raise DimensionMismatchError("direct sum needs a common field")
    F, m, n = E1.field, E1.dim, E2.dim
    rows = [row + (F.zero,) * n for row in E1.matrix]
    rows += [(F.zero,) * m + row for row in E2.matrix]
    return EvolutionAlgebra(F, tuple(rows))


def has_zero_summand(E: EvolutionAlgebra) -> bool:
    """Whether E = I (+) Fz for an ideal I and a nonzero z in ann(E).

    Equivalent to ann(E) not being contained in E^<2>: a functional killing
    E^<2> but not some z in ann(E) has an ideal as kernel, and shifting the
    non-annihilator basis vectors by multiples of z gives it a natural basis.
    """
    ann = annihilator(E).space
    if ann.dim == 0:
        return False
    square = power_chain_square(E)
    return ann.intersection_dim(square) < ann.dim


def power_chain_square(E: EvolutionAlgebra) -> Subspace:
    """E^<2>, the span of the rows of the structure matrix."""
    return Subspace.span(E.field, E.dim, E.matrix)


class Fingerprint(NamedTuple):
    """Isomorphism invariants.  Equal fingerprints prove nothing."""

    dim: int
    ann_dim: int
    chain_dims: tuple[int, ...]
    nilpotency_index: Optional[int]
    ann_in_square_dim: int
    square_zero_count: Optional[int]
    square_in_ann_count: Optional[int]


@lru_cache(maxsize=65536)
def fingerprint(E: EvolutionAlgebra) -> Fingerprint:
    F, m = E.field, E.dim
    chain = power_chain(E)
    ann = annihilator(E)
    sq = power_chain_square(E)
    zero_count = in_ann_count = None
    if F.is_finite and F.p ** m <= 1 << 16:
        zero_count = in_ann_count = 0
        nonann = [i for i in range(m) if i not in ann.indices]
        for x in itertools.product(range(F.p), repeat=m):
            xx = multiply(E, x, x)
            if is_zero(xx):
                zero_count += 1
            if all(xx[i] == 0 for i in nonann):
                in_ann_count += 1
    index = len(chain) if chain[-1].dim == 0 else None
    return Fingerprint(
        dim=m,
        ann_dim=ann.space.dim,
        chain_dims=tuple(s.dim for s in chain),
        nilpotency_index=index,
        ann_in_square_dim=ann.space.intersection_dim(sq),
        square_zero_count=zero_count,
        square_in_ann_count=in_ann_count,
    )


def random_nilpotent(F: Field, dim: int, rng, density: float = 0.5) -> EvolutionAlgebra:
    """A random strictly upper triangular structure matrix under a random relabelling."""
    vals = list(elements(F))
    perm = list(range(dim))
    rng.shuffle(perm)
    rows = [[F.zero] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            if rng.random() < density:
                rows[perm[i]][perm[j]] = rng.choice(vals)
    return EvolutionAlgebra(F, tuple(tuple(r) for r in rows))


def dim_square(E: EvolutionAlgebra) -> int:
    return rank(E.field, E.matrix, E.dim)
