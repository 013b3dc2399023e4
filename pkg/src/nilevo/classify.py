"""Dimension-by-dimension classification of nilpotent evolution algebras.

Every nilpotent evolution algebra either splits off a one-dimensional zero
ideal, and then is a direct sum E' (+) E_{1,1}, or is an annihilator
extension of E/ann(E) by ann(E) through a cocycle with independent columns
modulo coboundaries.  The first layer is built from the catalog one
dimension down and deduplicated with explicit isomorphism checks.  The
second layer is built from every lower-dimensional class, one admissible
orbit at a time.

Two extension methods are available.  ``"frames"`` (the default) repeats the
orbit partition in every natural basis of the base algebra, because a cocycle
class may become diagonal only after a change of natural basis that no
automorphism provides.  ``"fixed"`` uses the given basis only; it agrees with
``"frames"`` up to dimension 3 and misses classes in dimension 4.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .algebra import (
    EvolutionAlgebra,
    annihilator,
    direct_sum,
    fingerprint,
    has_zero_summand,
    is_nilpotent,
)
from .autos import Frame, natural_frames, orbit_partition, reaches_frame
from .cocycle import CocycleMatrix, compute_spaces, extend, has_annihilator_component
from .errors import UnsupportedFieldError
from .field import Field
from .linalg import Matrix
from .oracle import iso_check
from .search import DEFAULT_NODE_BUDGET

log = logging.getLogger(__name__)

METHODS = ("frames", "fixed")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ClassEntry:
    """One isomorphism class with the construction that produced it.

    ``kind`` is ``"base"`` for the one-dimensional zero algebra, ``"sum"``
    for E' (+) E_{1,1} with E' the class labelled ``base``, and
    ``"extension"`` for an annihilator extension of ``base``.  Extensions
    also record the frame (natural basis of the base, as columns), the
    subspace key in H coordinates and the cocycle used.
    """

    label: str
    algebra: EvolutionAlgebra
    kind: str
    base: Optional[str] = None
    s: int = 0
    frame: int = 0
    frame_basis: Optional[Matrix] = None
    key: Optional[Matrix] = None
    cocycle: Optional[CocycleMatrix] = None

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def to_json(self) -> dict:
        F = self.algebra.field
        out = {
            "label": self.label,
            "kind": self.kind,
            "base": self.base,
            "algebra": self.algebra.to_json(),
            "fingerprint": _jsonable(fingerprint(self.algebra)),
        }
        if self.kind == "extension":
            out.update({
                "s": self.s,
                "frame": self.frame,
                "frame_basis": [[F.to_str(x) for x in row] for row in self.frame_basis],
                "key": [[F.to_str(x) for x in row] for row in self.key],
                "cocycle": self.cocycle.to_json(),
            })
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ClassEntry":
        E = EvolutionAlgebra.from_json(data["algebra"])
        F = E.field
        if data["kind"] != "extension":
            return cls(data["label"], E, data["kind"], data.get("base"))
        return cls(
            data["label"], E, "extension", data["base"], data["s"], data["frame"],
            tuple(tuple(F(x) for x in row) for row in data["frame_basis"]),
            tuple(tuple(F(x) for x in row) for row in data["key"]),
            CocycleMatrix.from_json(data["cocycle"], F),
        )


def _jsonable(fp) -> list:
    return [list(x) if isinstance(x, tuple) else x for x in fp]


@dataclass
class ClassCatalog:
    """Class lists per dimension over one field, with verification flags."""

    field: Field
    method: str
    levels: dict[int, list[ClassEntry]] = field(default_factory=dict)
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def max_dim(self) -> int:
        return max(self.levels, default=0)

    def sizes(self) -> list[int]:
        return [len(self.levels[n]) for n in sorted(self.levels)]

    def entries(self, n: int) -> list[ClassEntry]:
        return self.levels[n]

    def algebras(self, n: int) -> list[EvolutionAlgebra]:
        return [e.algebra for e in self.levels[n]]

    def __getitem__(self, label: str) -> ClassEntry:
        for level in self.levels.values():
            for e in level:
                if e.label == label:
                    return e
        raise KeyError(label)

    @property
    def ok(self) -> bool:
        return all(self.flags.values())

    def to_json(self) -> dict:
        return {
            "field": str(self.field),
            "method": self.method,
            "sizes": self.sizes(),
            "flags": dict(sorted(self.flags.items())),
            "dimensions": [
                {"dim": n, "entries": [e.to_json() for e in self.levels[n]]}
                for n in sorted(self.levels)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClassCatalog":
        levels = {d["dim"]: [ClassEntry.from_json(e) for e in d["entries"]] for d in data["dimensions"]}
        return cls(Field.parse(data["field"]), data["method"], levels, dict(data["flags"]))


def label_for(n: int, k: int) -> str:
    return f"E{n}.{k}"


@dataclass(frozen=True)
class _Found:
    frame: Frame
    key: Matrix
    cocycle: CocycleMatrix


def extension_classes(
    base: EvolutionAlgebra, s: int, method: str = "frames", budget: int = DEFAULT_NODE_BUDGET
) -> list[_Found]:
    """Isomorphism classes of extensions of ``base`` by an s-dimensional V.

    The result contains only extensions without annihilator component, one
    per automorphism orbit of admissible subspaces.  With several frames an
    orbit is reported in the first frame whose diagonal forms it meets.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    frames = natural_frames(base) if method == "frames" else [Frame(0, _identity(base.dim), base)]
    found: list[_Found] = []
    for k, frame in enumerate(frames):
        spaces = compute_spaces(frame.algebra)
        if spaces.dim_h < s:
            continue
        for cls in orbit_partition(frame.algebra, spaces, s, budget=budget):
            if any(reaches_frame(frames[l], frame, cls.cocycle, budget) for l in range(k)):
                continue
            found.append(_Found(frame, cls.key, cls.cocycle))
    return found


def _identity(m: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(m)) for i in range(m))


def _extension_job(args):
    base, s, method, budget = args
    return extension_classes(base, s, method, budget)


def classify_dimension(
    F: Field,
    lower: dict[int, list[ClassEntry]],
    n: int,
    method: str = "frames",
    threads: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
) -> list[ClassEntry]:
    """Classes of dimension n, given complete class lists for every m < n."""
    if not F.is_finite:
        raise UnsupportedFieldError("classification runs over a finite field only")
    if n == 1:
        return [ClassEntry(label_for(1, 1), EvolutionAlgebra.zero(F, 1), "base")]
    missing = [m for m in range(1, n) if m not in lower]
    if missing:
        raise ValueError(f"class lists for dimensions {missing} are missing")

    out: list[ClassEntry] = []
    zero1 = EvolutionAlgebra.zero(F, 1)
    sums: list[EvolutionAlgebra] = []
    for prev in lower[n - 1]:
        D = direct_sum(prev.algebra, zero1)
        if any(iso_check(D, other, budget) is not None for other in sums):
            continue
        sums.append(D)
        out.append(ClassEntry(label_for(n, len(out) + 1), D, "sum", prev.label))

    bases = [(entry, n - m) for m in range(1, n) for entry in lower[m]]
    jobs = [(entry.algebra, s, method, budget) for entry, s in bases]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_extension_job, jobs))
    else:
        results = [_extension_job(j) for j in jobs]

    for (entry, s), found in zip(bases, results):
        for f in found:
            E = extend(f.frame.algebra, f.cocycle)
            out.append(ClassEntry(
                label_for(n, len(out) + 1), E, "extension", entry.label, s,
                f.frame.index, f.frame.basis, f.key, f.cocycle,
            ))
    log.info("dim %d over %s: %d classes", n, F, len(out))
    return out


def verify_level(entries: list[ClassEntry], budget: int = DEFAULT_NODE_BUDGET) -> dict[str, bool]:
    """Structural checks on one dimension of a catalog.

    ``pairwise_distinct`` runs iso_check on every pair; the fingerprint
    prefilter makes this cheap for all but a few pairs.
    """
    flags = {
        "nilpotent": all(is_nilpotent(e.algebra) for e in entries),
        "sums_split": all(has_zero_summand(e.algebra) for e in entries if e.kind == "sum"),
        "extensions_unsplit": True,
        "extension_annihilator_is_v": True,
    }
    for e in entries:
        if e.kind != "extension":
            continue
        m = e.dim - e.s
        if has_zero_summand(e.algebra):
            flags["extensions_unsplit"] = False
        base = EvolutionAlgebra(e.algebra.field, tuple(row[:m] for row in e.algebra.matrix[:m]))
        if has_annihilator_component(base, compute_spaces(base), e.cocycle):
            flags["extensions_unsplit"] = False
        if annihilator(e.algebra).indices != tuple(range(m, e.dim)):
            flags["extension_annihilator_is_v"] = False
    flags["pairwise_distinct"] = all(
        iso_check(a.algebra, b.algebra, budget) is None
        for i, a in enumerate(entries) for b in entries[i + 1:]
    )
    return flags


def full_catalog(
    F: Field,
    max_dim: int = 4,
    method: str = "frames",
    threads: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
    verify: bool = True,
    progress: Optional[Callable[[int, int], None]] = None,
) -> ClassCatalog:
    """Catalogs of every dimension 1..max_dim over a finite field."""
    if not F.is_finite:
        raise UnsupportedFieldError("classification runs over a finite field only")
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    cat = ClassCatalog(F, method)
    for n in range(1, max_dim + 1):
        cat.levels[n] = classify_dimension(F, cat.levels, n, method, threads, budget)
        if verify:
            for name, ok in verify_level(cat.levels[n], budget).items():
                cat.flags[f"dim{n}.{name}"] = ok
        if progress:
            progress(n, len(cat.levels[n]))
    return cat


@dataclass
class Matching:
    """Result of matching a list of algebras against classes.

    ``hits[i]`` lists the class indices the i-th algebra is isomorphic to.
    """

    hits: list[list[int]]
    class_count: int

    @property
    def misses(self) -> list[int]:
        return [i for i, h in enumerate(self.hits) if not h]

    @property
    def collisions(self) -> dict[int, list[int]]:
        by_class: dict[int, list[int]] = {}
        for i, h in enumerate(self.hits):
            for c in h:
                by_class.setdefault(c, []).append(i)
        return {c: v for c, v in sorted(by_class.items()) if len(v) > 1}

    @property
    def uncovered(self) -> list[int]:
        covered = {c for h in self.hits for c in h}
        return [c for c in range(self.class_count) if c not in covered]

    @property
    def bijection(self) -> bool:
        return (all(len(h) == 1 for h in self.hits) and not self.collisions
                and not self.uncovered)

    def to_json(self) -> dict:
        return {
            "bijection": self.bijection,
            "hits": self.hits,
            "misses": self.misses,
            "collisions": {str(k): v for k, v in self.collisions.items()},
            "uncovered": self.uncovered,
        }


def match_algebras(
    algebras: Iterable[EvolutionAlgebra],
    classes: Iterable[EvolutionAlgebra],
    budget: int = DEFAULT_NODE_BUDGET,
) -> Matching:
    """Compare every algebra with every class representative via iso_check."""
    classes = list(classes)
    hits = [[c for c, C in enumerate(classes) if iso_check(A, C, budget) is not None] for A in algebras]
    return Matching(hits, len(classes))
