from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilevo.algebra import (
    EvolutionAlgebra,
    annihilator,
    direct_sum,
    fingerprint,
    has_zero_summand,
    is_nilpotent,
    multiply,
    nilpotency_criteria,
    nilpotency_index,
    power_chain,
    quotient_by_annihilator,
    random_nilpotent,
    rebase,
)
from nilevo.errors import DimensionMismatchError
from nilevo.field import Field

from conftest import GF2, GF3, alg, brute_annihilator, brute_zero_summand


def test_table_rendering():
    E = alg(GF3, [(0, 1, 2), (0, 0, 1), (0, 0, 0)])
    assert E.table() == "e1^2 = e2 + 2e3, e2^2 = e3"
    assert EvolutionAlgebra.zero(GF3, 2).table() == "(all products zero)"


def test_json_round_trip():
    E = alg(Field(5), [(0, 3), (0, 0)])
    assert EvolutionAlgebra.from_json(E.to_json()) == E


def test_json_dim_mismatch():
    with pytest.raises(DimensionMismatchError):
        EvolutionAlgebra.from_json({"field": "gf:2", "dim": 3, "matrix": [[0, 1], [0, 0]]})


def test_non_square_matrix_rejected():
    with pytest.raises(DimensionMismatchError):
        EvolutionAlgebra.create(GF2, [(0, 1, 0), (0, 0, 1)])


def test_multiply_distinct_basis_vectors_vanish():
    E = alg(GF3, [(0, 1, 0), (0, 0, 1), (0, 0, 0)])
    assert multiply(E, (1, 0, 0), (0, 1, 0)) == (0, 0, 0)
    assert multiply(E, (1, 1, 0), (1, 1, 0)) == (0, 1, 1)


def test_chain_of_e34():
    E = alg(GF3, [(0, 1, 0), (0, 0, 1), (0, 0, 0)])
    assert [S.dim for S in power_chain(E)] == [3, 2, 1, 0]
    assert nilpotency_index(E) == 4
    assert annihilator(E).indices == (2,)


def test_non_nilpotent_chain_stabilises():
    E = alg(GF2, [(0, 1), (1, 0)])
    assert not is_nilpotent(E)
    assert nilpotency_index(E) is None
    assert nilpotency_criteria(E) == (False, False)


def test_self_loop_is_not_nilpotent():
    assert not is_nilpotent(alg(GF3, [(1, 0), (0, 0)]))


matrix_st = st.integers(1, 4).flatmap(
    lambda n: st.tuples(
        st.sampled_from([2, 3, 5]),
        st.lists(st.lists(st.integers(0, 4), min_size=n, max_size=n), min_size=n, max_size=n),
        st.floats(0, 1),
    )
)


@settings(max_examples=400, deadline=None)
@given(matrix_st)
def test_graph_and_chain_criteria_agree(case):
    p, rows, keep = case
    # thin out the matrix so that nilpotent cases are common
    rng = random.Random(str(rows))
    rows = [[x % p if rng.random() < keep * 0.6 else 0 for x in row] for row in rows]
    E = alg(Field(p), rows)
    by_graph, by_chain = nilpotency_criteria(E)
    assert by_graph == by_chain


def test_random_nilpotent_is_nilpotent():
    rng = random.Random(1)
    for _ in range(50):
        F = Field(rng.choice([2, 3, 5]))
        assert is_nilpotent(random_nilpotent(F, rng.randint(1, 5), rng))


@pytest.mark.parametrize("F", [GF2, GF3], ids=["gf2", "gf3"])
def test_annihilator_matches_enumeration(F):
    rng = random.Random(7)
    for _ in range(40):
        E = random_nilpotent(F, rng.randint(1, 4), rng)
        ann = annihilator(E).space
        assert {x for x in brute_annihilator(E)} == {x for x in _span_elements(F, ann)}


def _span_elements(F, S):
    import itertools

    out = set()
    for coeffs in itertools.product(range(F.p), repeat=S.dim):
        out.add(tuple(sum(c * b[k] for c, b in zip(coeffs, S.basis)) % F.p for k in range(S.ambient)))
    return out


def test_quotient_by_annihilator():
    E = alg(GF3, [(0, 0, 1), (0, 0, 2), (0, 0, 0)])
    Q, perm = quotient_by_annihilator(E)
    assert Q == EvolutionAlgebra.zero(GF3, 2)
    assert perm == (0, 1, 2)
    with pytest.raises(ValueError):
        quotient_by_annihilator(alg(GF3, [(0, 1), (1, 0)]))


def test_direct_sum_layout():
    E = direct_sum(alg(GF2, [(0, 1), (0, 0)]), EvolutionAlgebra.zero(GF2, 1))
    assert E.matrix == ((0, 1, 0), (0, 0, 0), (0, 0, 0))
    with pytest.raises(DimensionMismatchError):
        direct_sum(EvolutionAlgebra.zero(GF2, 1), EvolutionAlgebra.zero(GF3, 1))


@pytest.mark.parametrize("F", [GF2, GF3], ids=["gf2", "gf3"])
def test_zero_summand_matches_enumeration(F):
    rng = random.Random(11)
    for _ in range(60):
        E = random_nilpotent(F, rng.randint(1, 4), rng)
        assert has_zero_summand(E) == brute_zero_summand(E)


def test_rebase_gives_isomorphic_presentation():
    E = alg(GF2, [(0, 1, 0), (0, 0, 1), (0, 0, 0)])
    # natural basis e2+e3... columns: e3, e2 + e3, e1 (pairwise orthogonal)
    P = ((0, 0, 1), (0, 1, 0), (1, 1, 0))
    R = rebase(E, P)
    assert R.matrix == ((0, 0, 0), (1, 0, 0), (1, 1, 0))
    from nilevo.certificate import is_isomorphism

    assert is_isomorphism(P, R, E)


def test_rebase_requires_natural_basis():
    E = alg(GF3, [(0, 1), (0, 0)])
    with pytest.raises(ValueError):
        rebase(E, ((1, 1), (0, 1)))


def test_fingerprint_is_basis_invariant():
    E = alg(GF2, [(0, 1, 0), (0, 0, 1), (0, 0, 0)])
    R = rebase(E, ((0, 0, 1), (0, 1, 0), (1, 1, 0)))
    assert fingerprint(E) == fingerprint(R)
    assert E.matrix != R.matrix
