from __future__ import annotations

import itertools
import json

import pytest

from nilevo.algebra import annihilator, is_nilpotent
from nilevo.autos import enumerate_aut
from nilevo.catalog import (
    ALPHA,
    AUT_PREDICATES,
    SOURCES,
    _parse,
    aut_predicate,
    expected_count_dim3,
    instantiate,
    load,
    match,
)
from nilevo.classify import full_catalog
from nilevo.cocycle import compute_spaces
from nilevo.errors import DimensionMismatchError, UnsupportedFieldError
from nilevo.field import Field
from nilevo.linalg import Subspace
from nilevo.oracle import iso_check

from conftest import GF2, GF3, GF5, GF7, all_matrices

FIELDS = [GF2, GF3, GF5, GF7]


@pytest.fixture(scope="module")
def catalogs():
    return {F.p: full_catalog(F, 4, verify=False) for F in (GF2, GF3, GF5)}


def test_sources_load():
    sizes = {tag: len(load(tag)) for tag in SOURCES}
    assert sizes == {"table-1": 1, "table-2": 2, "table-3": 4,
                     "theorem-dim4-closed": 10, "theorem-dim4-real": 16}
    with pytest.raises(KeyError):
        load("table-9")


@pytest.mark.parametrize("source,p,count", [
    ("table-3", 3, 5), ("table-3", 2, 4), ("table-3", 7, 5),
    ("theorem-dim4-real", 5, 16), ("theorem-dim4-closed", 3, 10),
])
def test_instantiate_counts(source, p, count):
    assert len(instantiate(source, Field(p))) == count


def test_instantiate_names_gf3():
    names = [i.name for i in instantiate("table-3", GF3)]
    assert names == ["E_{3,1}", "E_{3,2}", "E_{3,3}^1", "E_{3,3}^2", "E_{3,4}"]


def test_alpha_needs_finite_field():
    Q = Field.rationals()
    with pytest.raises(UnsupportedFieldError):
        instantiate("table-3", Q)
    assert len(instantiate("table-2", Q)) == 2
    entry = load("table-3")[2]
    assert entry.parametrized
    with pytest.raises(ValueError):
        entry.instantiate(GF3)


def test_minus_one_maps_into_field():
    e47 = next(i.algebra for i in instantiate("theorem-dim4-real", GF5) if i.label == "E_{4,7}")
    assert e47.matrix[2] == (0, 0, 0, 4)


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: str(F))
def test_every_instance_nilpotent(F):
    for source in SOURCES:
        assert all(is_nilpotent(i.algebra) for i in instantiate(source, F))


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: str(F))
def test_table_metadata(F):
    for source, dim in (("table-1", 1), ("table-2", 2), ("table-3", 3)):
        entries = {e.label: e for e in load(source)}
        for inst in instantiate(source, F):
            entry = entries[inst.label]
            assert annihilator(inst.algebra).indices == tuple(i - 1 for i in entry.meta["ann"])
            spaces = compute_spaces(inst.algebra)
            assert spaces.b_space() == Subspace.span(F, dim, entry.expected_b_basis(F, inst.alpha))
            assert spaces.dim_h == entry.meta["h_dim"]


def test_e31_has_three_dimensional_h():
    entry = load("table-3")[0]
    assert entry.meta["h_dim"] == 3
    assert compute_spaces(entry.instantiate(GF3)).dim_h == 3


@pytest.mark.parametrize("p", [2, 3])
def test_aut_predicates_match_enumeration(p):
    F = Field(p)
    for source in ("table-1", "table-2", "table-3"):
        entries = {e.label: e for e in load(source)}
        for inst in instantiate(source, F):
            pred = aut_predicate(entries[inst.label])
            aut = enumerate_aut(inst.algebra)
            n = inst.algebra.dim
            if p ** (n * n) > 20000:
                assert all(pred(F, inst.alpha, phi) for phi in aut)
                continue
            brute = {P for P in all_matrices(F, n) if pred(F, inst.alpha, P)}
            assert brute == set(aut), inst.name


def test_aut_predicates_hold_gf5():
    for inst in instantiate("table-3", GF5):
        if inst.label == "E_{3,1}":
            continue
        entry = next(e for e in load("table-3") if e.label == inst.label)
        aut = enumerate_aut(inst.algebra)
        assert all(aut_predicate(entry)(GF5, inst.alpha, phi) for phi in aut)


def test_aut_predicate_requires_meta():
    with pytest.raises(KeyError):
        aut_predicate(load("theorem-dim4-real")[0])
    assert set(AUT_PREDICATES) == {"GL", "E_{2,2}", "E_{3,2}", "E_{3,3}", "E_{3,4}"}


@pytest.mark.parametrize("p", [3, 5, 7])
def test_table3_pairwise_distinct_odd(p):
    algs = [i.algebra for i in instantiate("table-3", Field(p))]
    for a, b in itertools.combinations(algs, 2):
        assert iso_check(a, b) is None


def test_expected_count_dim3():
    assert [expected_count_dim3(F) for F in FIELDS] == [4, 5, 5, 5]
    with pytest.raises(UnsupportedFieldError):
        expected_count_dim3(Field.rationals())


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_table_bijections(p):
    F = Field(p)
    cat = full_catalog(F, 3, verify=False)
    for source in ("table-1", "table-2", "table-3"):
        rep = match(cat, source)
        assert rep.bijection, rep.lines()
        assert rep.complete


def test_dim4_real_gf5(catalogs):
    rep = match(catalogs[5], "theorem-dim4-real")
    assert rep.complete and not rep.bijection
    groups = {frozenset(rep.names[i] for i in v) for v in rep.matching.collisions.values()}
    assert frozenset({"E_{4,6}", "E_{4,7}"}) in groups
    assert groups == {frozenset(g) for g in [
        {"E_{4,3}", "E_{4,4}"}, {"E_{4,6}", "E_{4,7}"}, {"E_{4,8}", "E_{4,9}"},
        {"E_{4,10}", "E_{4,12}"}, {"E_{4,11}", "E_{4,13}", "E_{4,14}"},
    ]}
    assert len(rep.matching.uncovered) == 8


def test_dim4_real_gf3(catalogs):
    rep = match(catalogs[3], "theorem-dim4-real")
    assert rep.complete
    groups = [sorted(rep.names[i] for i in v) for v in rep.matching.collisions.values()]
    assert groups == [["E_{4,6}", "E_{4,7}"]]


def test_dim4_real_gf2_collides_signs(catalogs):
    rep = match(catalogs[2], "theorem-dim4-real")
    assert rep.complete
    groups = {frozenset(rep.names[i] for i in v) for v in rep.matching.collisions.values()}
    assert frozenset({"E_{4,3}", "E_{4,4}"}) in groups


@pytest.mark.parametrize("p", [2, 3, 5])
def test_dim4_closed_complete(catalogs, p):
    rep = match(catalogs[p], "theorem-dim4-closed")
    assert rep.complete
    assert not rep.matching.misses


def test_match_report_json(catalogs):
    rep = match(catalogs[3], "theorem-dim4-real")
    data = json.loads(json.dumps(rep.to_json()))
    assert data["complete"] is True and data["bijection"] is False
    assert data["collisions"]
    assert any(line.startswith("collision in") for line in rep.lines())


def test_match_dimension_mismatch():
    cat = full_catalog(GF3, 2, verify=False)
    with pytest.raises(DimensionMismatchError):
        match(cat, "table-3")


def test_parse_rejects_bad_entries():
    good = {"label": "X", "dim": 2, "source": "t", "products": [{"i": 1, "j": 1, "coords": [0, 1]}]}
    assert _parse([good])[0].squares == ((0, 1), (0, 0))
    with pytest.raises(ValueError):
        _parse([good, good])
    with pytest.raises(ValueError):
        _parse([dict(good, products=[{"i": 1, "j": 2, "coords": [0, 1]}])])
    with pytest.raises(DimensionMismatchError):
        _parse([dict(good, products=[{"i": 1, "j": 1, "coords": [0, 1, 0]}])])
    assert ALPHA == "ALPHA"
