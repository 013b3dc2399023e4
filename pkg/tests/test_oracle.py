from __future__ import annotations

import random

import pytest

from nilevo.algebra import EvolutionAlgebra, is_nilpotent, random_nilpotent, rebase
from nilevo.catalog import instantiate
from nilevo.certificate import IsoCertificate
from nilevo.cocycle import CocycleMatrix, coboundary, extend
from nilevo.errors import BudgetExceededError, DimensionMismatchError, UnsupportedFieldError
from nilevo.field import Field
from nilevo.linalg import identity
from nilevo.oracle import (
    acyclic_supports,
    check_budget,
    iso_check,
    nilpotent_matrices,
    nilpotent_matrices_naive,
    oracle_classify,
)

from conftest import GF2, GF3, GF7, alg


def _real(F, label):
    return next(i.algebra for i in instantiate("theorem-dim4-real", F) if i.label == label)


@pytest.mark.parametrize("p,dim", [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (5, 2)])
def test_support_enumeration_matches_naive(p, dim):
    F = Field(p)
    assert list(nilpotent_matrices(F, dim)) == list(nilpotent_matrices_naive(F, dim))


def test_acyclic_support_counts():
    # labelled DAGs on n vertices: 1, 3, 25, 543
    assert [len(acyclic_supports(n)) for n in (1, 2, 3, 4)] == [1, 3, 25, 543]


@pytest.mark.parametrize("p,dim,count", [
    (2, 1, 1), (2, 2, 2), (2, 3, 4), (3, 1, 1), (3, 2, 2), (3, 3, 5), (5, 3, 5),
])
def test_counts_dims_up_to_three(p, dim, count):
    assert oracle_classify(Field(p), dim).count == count


def test_gf2_dim4():
    res = oracle_classify(GF2, 4)
    assert res.count == 12
    assert res.nilpotent_count == 543
    assert sum(res.class_sizes) == 543
    assert res.class_sizes == [1, 28, 144, 18, 36, 24, 96, 96, 48, 24, 24, 4]
    assert all(is_nilpotent(E) for E in res.representatives)


def test_representatives_pairwise_distinct():
    res = oracle_classify(GF3, 3)
    reps = res.representatives
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            assert iso_check(a, b) is None


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_shuffle_invariance(seed):
    base = oracle_classify(GF3, 3)
    shuffled = oracle_classify(GF3, 3, shuffle_seed=seed)
    assert shuffled.count == base.count
    assert shuffled.representatives == base.representatives
    assert shuffled.class_sizes == base.class_sizes


def test_threads_do_not_change_result():
    a = oracle_classify(GF2, 3)
    b = oracle_classify(GF2, 3, threads=2)
    assert a.representatives == b.representatives and a.class_sizes == b.class_sizes


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "oracle.ck.json"
    full = oracle_classify(GF3, 3)

    class Stop(Exception):
        pass

    def interrupt(position):
        raise Stop

    with pytest.raises(Stop):
        oracle_classify(GF3, 3, checkpoint=ck, checkpoint_every=100, progress=interrupt)
    assert ck.exists()
    resumed = oracle_classify(GF3, 3, checkpoint=ck, checkpoint_every=100, resume=True)
    assert resumed.representatives == full.representatives
    assert resumed.class_sizes == full.class_sizes
    assert resumed.nilpotent_count == full.nilpotent_count


def test_checkpoint_for_other_field_refused(tmp_path):
    ck = tmp_path / "oracle.ck.json"
    oracle_classify(GF2, 3, checkpoint=ck, checkpoint_every=10)
    with pytest.raises(ValueError):
        oracle_classify(GF3, 3, checkpoint=ck, resume=True)


def test_budget_guard():
    with pytest.raises(BudgetExceededError):
        oracle_classify(GF7, 3)
    with pytest.raises(BudgetExceededError):
        check_budget(GF3, 4)
    check_budget(GF3, 4, big=True)
    with pytest.raises(UnsupportedFieldError):
        check_budget(Field.rationals(), 2)


def test_iso_check_reflexive_and_symmetric():
    rng = random.Random(4)
    for _ in range(60):
        F = Field(rng.choice([2, 3, 5]))
        E = random_nilpotent(F, rng.randint(1, 4), rng)
        cert = iso_check(E, E)
        assert cert is not None and cert.verify(E, E)
        # a random natural rebasing gives an isomorphic presentation
        perm = list(range(E.dim))
        rng.shuffle(perm)
        P = tuple(tuple(1 if perm[j] == i else 0 for j in range(E.dim)) for i in range(E.dim))
        E2 = rebase(E, P)
        fwd, back = iso_check(E, E2), iso_check(E2, E)
        assert fwd.verify(E, E2) and back.verify(E2, E)
        assert fwd.inverse(F).verify(E2, E)
        other = random_nilpotent(F, E.dim, rng)
        assert (iso_check(E, other) is None) == (iso_check(other, E) is None)


def test_iso_check_identity_on_self():
    E = alg(GF3, [(0, 1, 0), (0, 0, 1), (0, 0, 0)])
    assert iso_check(E, E).matrix == identity(GF3, 3)


def test_e33_square_classes():
    for F in (GF3, GF7):
        nonsquare = 2 if F.p == 3 else 3
        a = alg(F, [(0, 0, 1), (0, 0, 1), (0, 0, 0)])
        b = alg(F, [(0, 0, 1), (0, 0, nonsquare), (0, 0, 0)])
        assert iso_check(a, b) is None
        assert iso_check(a, alg(F, [(0, 0, 1), (0, 0, 4), (0, 0, 0)])) is not None


@pytest.mark.parametrize("p", [3, 5, 7])
def test_real_e46_e47_isomorphic_over_odd_prime_fields(p):
    # ternary forms over GF(p) are classified by discriminant, and x^2+y^2+z^2
    # is equivalent to -(x^2+y^2-z^2) since (-1)^3 = -1
    F = Field(p)
    a, b = _real(F, "E_{4,6}"), _real(F, "E_{4,7}")
    cert = iso_check(a, b)
    assert cert is not None and cert.verify(a, b)


def test_real_e46_e47_gf3_certificate():
    a, b = _real(GF3, "E_{4,6}"), _real(GF3, "E_{4,7}")
    P = ((0, 1, 1, 0), (0, 1, 2, 0), (1, 0, 0, 0), (0, 0, 0, 2))
    assert IsoCertificate(P).verify(a, b)


def test_iso_check_errors():
    with pytest.raises(DimensionMismatchError):
        iso_check(EvolutionAlgebra.zero(GF2, 2), EvolutionAlgebra.zero(GF3, 2))
    with pytest.raises(UnsupportedFieldError):
        Q = Field.rationals()
        iso_check(EvolutionAlgebra.zero(Q, 2), EvolutionAlgebra.zero(Q, 2))
    assert iso_check(EvolutionAlgebra.zero(GF2, 2), EvolutionAlgebra.zero(GF2, 3)) is None


def test_equivalent_cocycles_gf3():
    rng = random.Random(17)
    for _ in range(200):
        m, s = rng.randint(1, 3), rng.randint(1, 2)
        E = random_nilpotent(GF3, m, rng)
        theta = CocycleMatrix(GF3, m, tuple(tuple(rng.randrange(3) for _ in range(m)) for _ in range(s)))
        f = [[rng.randrange(3) for _ in range(m)] for _ in range(s)]
        a, b = extend(E, theta), extend(E, theta + coboundary(E, f))
        assert iso_check(a, b) is not None
