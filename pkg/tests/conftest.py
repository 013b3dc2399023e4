from __future__ import annotations

import itertools

import pytest

from nilevo.algebra import EvolutionAlgebra, multiply
from nilevo.field import Field
from nilevo.linalg import is_zero

GF2, GF3, GF5, GF7 = Field(2), Field(3), Field(5), Field(7)


def alg(F: Field, rows) -> EvolutionAlgebra:
    return EvolutionAlgebra.create(F, rows)


def all_vectors(F: Field, n: int):
    return itertools.product(range(F.p), repeat=n)


def all_matrices(F: Field, n: int):
    for flat in itertools.product(range(F.p), repeat=n * n):
        yield tuple(tuple(flat[r * n:(r + 1) * n]) for r in range(n))


def brute_annihilator(E: EvolutionAlgebra) -> set:
    """Every x with x * e_j = 0 for all j, by enumeration."""
    F, n = E.field, E.dim
    units = [tuple(1 if k == j else 0 for k in range(n)) for j in range(n)]
    return {x for x in all_vectors(F, n) if all(is_zero(multiply(E, x, u)) for u in units)}


def brute_zero_summand(E: EvolutionAlgebra) -> bool:
    """Search for z in ann(E) and a functional f with f(E^2) = 0, f(z) != 0.

    Such a pair splits E as ker f (+) Fz; conversely a splitting E = I (+) Fz
    gives f vanishing on I, which contains E^2.
    """
    F, n = E.field, E.dim
    ann = [z for z in brute_annihilator(E) if any(z)]
    for f in all_vectors(F, n):
        if not any(f):
            continue
        if any(sum(a * b for a, b in zip(f, row)) % F.p for row in E.matrix):
            continue
        if any(sum(a * b for a, b in zip(f, z)) % F.p for z in ann):
            return True
    return False


def brute_automorphisms(E: EvolutionAlgebra) -> set:
    """All invertible P with P(e_i)P(e_j) = P(e_i e_j), by enumerating every matrix."""
    from nilevo.certificate import is_isomorphism

    return {P for P in all_matrices(E.field, E.dim) if is_isomorphism(P, E, E)}


@pytest.fixture(params=[2, 3, 5], ids=["gf2", "gf3", "gf5"])
def small_field(request) -> Field:
    return Field(request.param)
