"""Automorphism groups over GF(p) and their action on cocycle classes.

An automorphism phi acts on a diagonal form theta by
phi.theta(x, y) = theta(phi x, phi y); in matrices phi^T diag(theta) phi.  The
result is again diagonal only for phi in the subset S_theta, so on diagonal
forms this is a partial action.  Subspaces of H are compared by span, which
absorbs the scalar freedom psi in GL(V).

Diagonality depends on the chosen natural basis.  A class of cocycles can
be diagonal in some natural basis of E while no automorphism makes it
diagonal in the given one, so complete enumeration works frame by frame:
see :func:`natural_frames` and :func:`reaches_frame`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

from .algebra import EvolutionAlgebra, multiply, rebase
from .cocycle import CocycleMatrix, CocycleSpaces, DiagonalForm, is_admissible
from .errors import UnsupportedFieldError
from .field import Field
from .linalg import Matrix, is_zero, rank, rref, transpose
from .search import DEFAULT_NODE_BUDGET, search


@dataclass(frozen=True)
class AutGroup:
    algebra: EvolutionAlgebra
    elements: tuple[Matrix, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, phi) -> bool:
        return tuple(map(tuple, phi)) in self._index

    @cached_property
    def _index(self) -> frozenset:
        return frozenset(self.elements)


def enumerate_aut(E: EvolutionAlgebra, budget: int = DEFAULT_NODE_BUDGET) -> AutGroup:
    """Every automorphism of E, sorted.  Needs a finite field."""
    if not E.field.is_finite:
        raise UnsupportedFieldError("automorphism enumeration needs a finite field")
    elems = sorted(search(E.field, E.matrix, E.matrix, find_all=True, budget=budget))
    return AutGroup(E, tuple(elems))


def act(F: Field, phi: Sequence[Sequence], theta: Sequence) -> Optional[DiagonalForm]:
    """Diagonal of phi^T diag(theta) phi, or None if that matrix is not diagonal."""
    m = len(phi)
    cols = list(zip(*phi)) if m else []
    out = []
    for i in range(m):
        for j in range(i, m):
            acc = F.zero
            for k in range(m):
                t = theta[k]
                if t and cols[i][k] and cols[j][k]:
                    acc = F.add(acc, F.mul(t, F.mul(cols[i][k], cols[j][k])))
            if i == j:
                out.append(acc)
            elif acc != 0:
                return None
    return tuple(out)


def stabilizer_subset(
    E: EvolutionAlgebra,
    theta: CocycleMatrix,
    aut: Optional[AutGroup] = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> list[Matrix]:
    """S_theta: automorphisms phi for which every phi.theta_j is diagonal.

    With ``aut`` given this filters the group; otherwise the constraint is
    folded into the automorphism search, which avoids listing Aut(E).
    """
    if aut is not None:
        return [phi for phi in aut if all(act(E.field, phi, c) is not None for c in theta.cols)]
    if not E.field.is_finite:
        raise UnsupportedFieldError("S_theta enumeration needs a finite field")
    return sorted(search(E.field, E.matrix, E.matrix, ortho=theta.cols, find_all=True, budget=budget))


def rref_subspaces(F: Field, n: int, k: int) -> Iterator[Matrix]:
    """Every k-dimensional subspace of F^n, once, as its RREF basis (sorted)."""
    if not F.is_finite:
        raise UnsupportedFieldError("subspace enumeration needs a finite field")
    out = []
    for pivots in itertools.combinations(range(n), k):
        free = [(r, c) for r in range(k) for c in range(n) if c > pivots[r] and c not in pivots]
        for vals in itertools.product(range(F.p), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            out.append(tuple(tuple(r) for r in rows))
    return iter(sorted(out))


@dataclass(frozen=True)
class SubspaceClass:
    """An orbit of admissible s-dimensional subspaces of H.

    ``key`` is the RREF basis (in H coordinates) of the least member;
    ``cocycle`` lifts that basis to diagonal forms.
    """

    key: Matrix
    cocycle: CocycleMatrix
    orbit_id: int
    members: tuple[Matrix, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def lift_key(spaces: CocycleSpaces, key: Matrix, m: int) -> CocycleMatrix:
    return CocycleMatrix(spaces.field, m, tuple(spaces.lift(row) for row in key))


def span_key(spaces: CocycleSpaces, forms: Sequence[DiagonalForm]) -> Matrix:
    R, _ = rref(spaces.field, [spaces.h_coords(f) for f in forms], spaces.dim_h)
    return R


def admissible_keys(E: EvolutionAlgebra, spaces: CocycleSpaces, s: int) -> list[Matrix]:
    if s > spaces.dim_h:
        return []
    return [key for key in rref_subspaces(E.field, spaces.dim_h, s)
            if is_admissible(E, spaces, lift_key(spaces, key, E.dim))[0]]


def images(E: EvolutionAlgebra, spaces: CocycleSpaces, theta: CocycleMatrix, phis) -> set:
    """Subspaces of H reached from span(theta) by the phis at which the action is defined."""
    out = set()
    for phi in phis:
        moved = [act(E.field, phi, c) for c in theta.cols]
        if any(v is None for v in moved):
            continue
        key = span_key(spaces, moved)
        if len(key) != theta.s:
            raise AssertionError("automorphism image lost rank in H")
        out.add(key)
    return out


def orbit_partition(
    E: EvolutionAlgebra,
    spaces: CocycleSpaces,
    s: int,
    aut: Optional[AutGroup] = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> list[SubspaceClass]:
    """Classes of admissible s-dimensional subspaces W of H under Aut(E).

    W' and W are related when some phi carries a basis of W' (lifted to
    diagonal forms) to diagonal forms spanning W modulo coboundaries.  The
    relation coincides with isomorphism of the extensions, so the class of
    W' is exactly the set of images of W' under S_theta(W'); one S_theta
    computation per class suffices.
    """
    if not E.field.is_finite:
        raise UnsupportedFieldError("orbit enumeration needs a finite field")
    keys = admissible_keys(E, spaces, s)
    admissible = set(keys)
    assigned: dict[Matrix, int] = {}
    classes = []
    for key in keys:
        if key in assigned:
            continue
        theta = lift_key(spaces, key, E.dim)
        reached = images(E, spaces, theta, stabilizer_subset(E, theta, aut, budget))
        if key not in reached or not reached <= admissible:
            raise AssertionError(f"orbit of {key} left the admissible set")
        oid = len(classes)
        for k in reached:
            if k in assigned:
                raise AssertionError("orbits overlap")
            assigned[k] = oid
        classes.append(SubspaceClass(key, theta, oid, tuple(sorted(reached))))
    return classes


def orbit_relation(E: EvolutionAlgebra, spaces: CocycleSpaces, s: int, aut: AutGroup) -> dict:
    """For every admissible W', the set of W reachable from it by one automorphism."""
    return {key: images(E, spaces, lift_key(spaces, key, E.dim), aut)
            for key in admissible_keys(E, spaces, s)}


@dataclass(frozen=True)
class Frame:
    """A natural basis of an algebra, up to automorphisms and monomial changes.

    ``basis`` holds the basis vectors as columns; ``algebra`` is the algebra
    rewritten in that basis.  Two natural bases with the same structure
    matrix differ by an automorphism, so one frame per monomial class of
    structure matrices covers every natural basis.
    """

    index: int
    basis: Matrix
    algebra: EvolutionAlgebra


def _projective_points(F: Field, m: int) -> list[tuple]:
    return [v for v in itertools.product(range(F.p), repeat=m)
            if any(v) and v[next(k for k, x in enumerate(v) if x)] == 1]


def monomial_canonical(F: Field, A: Matrix) -> Matrix:
    """Least structure matrix reachable from A by permuting and rescaling the basis.

    With e'_i = c_i e_pi(i) the new entries are c_i^2 a_(pi i, pi k) / c_k.
    """
    m = len(A)
    best = None
    for perm in itertools.permutations(range(m)):
        for c in itertools.product(range(1, F.p), repeat=m):
            inv = [pow(x, -1, F.p) for x in c]
            B = tuple(tuple(c[i] * c[i] * A[perm[i]][perm[k]] * inv[k] % F.p for k in range(m))
                      for i in range(m))
            if best is None or B < best:
                best = B
    return best


def natural_frames(E: EvolutionAlgebra) -> list[Frame]:
    """One natural basis of E per class of structure matrices, given basis first.

    Bases are enumerated as sets of pairwise orthogonal projective points;
    the resulting structure matrices are then grouped up to monomial change.
    """
    F, m = E.field, E.dim
    if not F.is_finite:
        raise UnsupportedFieldError("frame enumeration needs a finite field")
    ident = tuple(tuple(1 if i == j else 0 for j in range(m)) for i in range(m))
    if all(is_zero(row) for row in E.matrix):
        # every basis is natural and every structure matrix is zero
        return [Frame(0, ident, E)]
    points = _projective_points(F, m)
    orth = {(a, b) for a in range(len(points)) for b in range(a + 1, len(points))
            if is_zero(multiply(E, points[a], points[b]))}
    seen: dict[Matrix, Matrix] = {}

    def rec(chosen):
        if len(chosen) == m:
            P = transpose([points[c] for c in chosen], m)
            A = rebase(E, P).matrix
            if A not in seen:
                seen[A] = P
            return
        start = chosen[-1] + 1 if chosen else 0
        for c in range(start, len(points)):
            if all((a, c) in orth for a in chosen):
                if rank(F, [points[a] for a in chosen] + [points[c]], m) == len(chosen) + 1:
                    rec(chosen + [c])

    rec([])
    classes: dict[Matrix, Matrix] = {}
    for A in sorted(seen):
        classes.setdefault(monomial_canonical(F, A), seen[A])
    own = monomial_canonical(F, E.matrix)
    frames = [Frame(0, ident, E)]
    for canon in sorted(classes):
        if canon == own:
            continue
        P = classes[canon]
        frames.append(Frame(len(frames), P, rebase(E, P)))
    return frames


def reaches_frame(
    target: Frame, source: Frame, theta: CocycleMatrix, budget: int = DEFAULT_NODE_BUDGET
) -> bool:
    """Whether some isomorphism target -> source pulls theta back to a diagonal form.

    theta lives on ``source.algebra``.  A positive answer means the
    automorphism orbit of span(theta) also meets the diagonal forms of
    ``target``.
    """
    F = source.algebra.field
    hits = search(F, target.algebra.matrix, source.algebra.matrix, ortho=theta.cols, budget=budget)
    return next(iter(hits), None) is not None
