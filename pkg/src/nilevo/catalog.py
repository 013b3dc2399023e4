"""Published class lists as data, instantiated over concrete fields.

Each data file lists algebras by their nonzero squares.  Coefficients are
small integers or the symbol ``"ALPHA"``, a parameter that runs over
representatives of the square classes of the field.  Entries of the
dimension <= 3 tables also carry their annihilator, a basis of the
coboundaries, dim H and the name of an automorphism predicate, so the
tables can be checked against what the library computes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Callable, NamedTuple, Optional

from .algebra import EvolutionAlgebra, is_nilpotent
from .classify import ClassCatalog, Matching, match_algebras
from .errors import DimensionMismatchError, UnsupportedFieldError
from .field import Element, Field, square_classes
from .linalg import Matrix, is_invertible
from .schemas import validate

ALPHA = "ALPHA"

SOURCES = {
    "table-1": "table1.json",
    "table-2": "table2.json",
    "table-3": "table3.json",
    "theorem-dim4-closed": "dim4_closed.json",
    "theorem-dim4-real": "dim4_real.json",
}


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    dim: int
    squares: tuple[tuple, ...]
    source: str
    meta: Optional[dict] = None

    @property
    def parametrized(self) -> bool:
        return any(c == ALPHA for row in self.squares for c in row)

    def instantiate(self, F: Field, alpha: Element = None) -> EvolutionAlgebra:
        if self.parametrized and alpha is None:
            raise ValueError(f"{self.label} needs a value for alpha")
        rows = [[alpha if c == ALPHA else c for c in row] for row in self.squares]
        return EvolutionAlgebra.create(F, rows)

    def expected_b_basis(self, F: Field, alpha: Element = None) -> list:
        return [tuple(F(alpha if c == ALPHA else c) for c in row) for row in self.meta["b_basis"]]


class Instance(NamedTuple):
    label: str
    alpha: Optional[Element]
    algebra: EvolutionAlgebra

    @property
    def name(self) -> str:
        return self.label if self.alpha is None else f"{self.label}^{self.alpha}"


def _parse(raw: list) -> list[CatalogEntry]:
    out = []
    seen = set()
    for item in raw:
        label, dim = item["label"], item["dim"]
        if label in seen:
            raise ValueError(f"duplicate label {label}")
        seen.add(label)
        rows = [[0] * dim for _ in range(dim)]
        for prod in item["products"]:
            i, j = prod["i"], prod["j"]
            if i != j:
                raise ValueError(f"{label}: only squares e_i^2 may be listed, got e{i}e{j}")
            if not 1 <= i <= dim or len(prod["coords"]) != dim:
                raise DimensionMismatchError(f"{label}: product e{i}^2 does not fit dimension {dim}")
            rows[i - 1] = list(prod["coords"])
        out.append(CatalogEntry(label, dim, tuple(tuple(r) for r in rows), item["source"], item.get("meta")))
    return out


@lru_cache(maxsize=None)
def load(source: str) -> tuple[CatalogEntry, ...]:
    """Entries of one source tag, validated against the catalog schema."""
    if source not in SOURCES:
        raise KeyError(f"unknown source {source!r}; expected one of {sorted(SOURCES)}")
    raw = json.loads(resources.files("nilevo").joinpath("data").joinpath(SOURCES[source]).read_text())
    validate(raw, "catalog")
    entries = _parse(raw)
    if any(e.source != source for e in entries):
        raise ValueError(f"{SOURCES[source]} contains entries of another source")
    return tuple(entries)


def instantiate(source: str, F: Field) -> list[Instance]:
    """Concrete algebras in catalog order; alpha entries expand over square classes."""
    out = []
    for entry in load(source):
        if entry.parametrized:
            if not F.is_finite:
                raise UnsupportedFieldError("alpha expansion needs finitely many square classes")
            for a in square_classes(F):
                out.append(Instance(entry.label, a, entry.instantiate(F, a)))
        else:
            out.append(Instance(entry.label, None, entry.instantiate(F)))
    for inst in out:
        if not is_nilpotent(inst.algebra):
            raise ValueError(f"{inst.name} over {F} is not nilpotent")
    return out


@dataclass
class MatchReport:
    source: str
    field: Field
    dim: int
    names: list[str]
    class_labels: list[str]
    matching: Matching

    @property
    def bijection(self) -> bool:
        return self.matching.bijection

    @property
    def complete(self) -> bool:
        """Every instantiated algebra lands in exactly one computed class."""
        return all(len(h) == 1 for h in self.matching.hits)

    def lines(self) -> list[str]:
        out = []
        for name, hits in zip(self.names, self.matching.hits):
            target = ", ".join(self.class_labels[c] for c in hits) or "no class"
            out.append(f"{name} -> {target}")
        for c, members in self.matching.collisions.items():
            out.append(f"collision in {self.class_labels[c]}: " + ", ".join(self.names[i] for i in members))
        if self.matching.uncovered:
            out.append("classes without a catalog algebra: "
                       + ", ".join(self.class_labels[c] for c in self.matching.uncovered))
        return out

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "field": str(self.field),
            "dim": self.dim,
            "names": self.names,
            "classes": self.class_labels,
            "bijection": self.bijection,
            "complete": self.complete,
            **{k: v for k, v in self.matching.to_json().items() if k != "bijection"},
        }


def match(computed: ClassCatalog, source: str, instances: Optional[list[Instance]] = None) -> MatchReport:
    """Compare a source's instantiation with the computed classes of the same dimension."""
    F = computed.field
    if instances is None:
        instances = instantiate(source, F)
    dims = {inst.algebra.dim for inst in instances}
    if len(dims) != 1:
        raise DimensionMismatchError(f"{source} mixes dimensions {sorted(dims)}")
    (dim,) = dims
    if dim not in computed.levels:
        raise DimensionMismatchError(f"computed catalog has no dimension {dim}")
    if any(inst.algebra.field != F for inst in instances):
        raise DimensionMismatchError("instances and catalog live over different fields")
    entries = computed.entries(dim)
    matching = match_algebras([i.algebra for i in instances], [e.algebra for e in entries])
    return MatchReport(source, F, dim, [i.name for i in instances], [e.label for e in entries], matching)


# Automorphism predicates for the block forms of the dimension <= 3 lists.
# ``phi`` has the image of e_i in column i; ``a(i, j)`` reads entry (i, j) 1-based.

def _aut_gl(F: Field, alpha, phi: Matrix) -> bool:
    return is_invertible(F, phi)


def _aut_e22(F: Field, alpha, phi: Matrix) -> bool:
    a = lambda i, j: phi[i - 1][j - 1]
    return a(1, 2) == 0 and a(1, 1) != 0 and a(2, 2) == F.power(a(1, 1), 2)


def _aut_e32(F: Field, alpha, phi: Matrix) -> bool:
    a = lambda i, j: phi[i - 1][j - 1]
    shape = a(1, 2) == 0 and a(1, 3) == 0 and a(3, 2) == 0 and a(2, 2) == F.power(a(1, 1), 2)
    return shape and is_invertible(F, phi)


def _aut_e33(F: Field, alpha, phi: Matrix) -> bool:
    a = lambda i, j: phi[i - 1][j - 1]
    sq = lambda x: F.mul(x, x)
    if a(1, 3) != 0 or a(2, 3) != 0 or not is_invertible(F, phi):
        return False
    return (F.add(sq(a(1, 1)), F.mul(alpha, sq(a(2, 1)))) == a(3, 3)
            and F.add(sq(a(1, 2)), F.mul(alpha, sq(a(2, 2)))) == F.mul(alpha, a(3, 3))
            and F.add(F.mul(a(1, 1), a(1, 2)), F.mul(alpha, F.mul(a(2, 1), a(2, 2)))) == 0)


def _aut_e34(F: Field, alpha, phi: Matrix) -> bool:
    a = lambda i, j: phi[i - 1][j - 1]
    zeros = all(a(i, j) == 0 for i, j in [(1, 2), (1, 3), (2, 1), (2, 3), (3, 2)])
    return (zeros and a(1, 1) != 0 and a(2, 2) == F.power(a(1, 1), 2)
            and a(3, 3) == F.power(a(1, 1), 4))


AUT_PREDICATES: dict[str, Callable[[Field, Optional[Element], Matrix], bool]] = {
    "GL": _aut_gl,
    "E_{2,2}": _aut_e22,
    "E_{3,2}": _aut_e32,
    "E_{3,3}": _aut_e33,
    "E_{3,4}": _aut_e34,
}


def aut_predicate(entry: CatalogEntry) -> Callable[[Field, Optional[Element], Matrix], bool]:
    if not entry.meta:
        raise KeyError(f"{entry.label} has no automorphism data")
    return AUT_PREDICATES[entry.meta["aut"]]


def expected_count_dim3(F: Field) -> int:
    """Number of dimension-3 classes over a finite field: 5 in odd characteristic, 4 in even."""
    if not F.is_finite:
        raise UnsupportedFieldError("the dimension-3 count is tabulated for finite fields")
    return 4 if F.characteristic == 2 else 5
