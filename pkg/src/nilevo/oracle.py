"""Brute-force ground truth: isomorphism testing and exhaustive class enumeration.

Nothing here uses cocycles, automorphism orbits or the extension machinery;
classes are found by enumerating structure matrices and merging isomorphic
presentations with :func:`iso_check`.
"""

from __future__ import annotations

import itertools
import json
import logging
import random
from functools import lru_cache
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional

from .algebra import EvolutionAlgebra, fingerprint, _acyclic
from .certificate import IsoCertificate
from .errors import BudgetExceededError, DimensionMismatchError, UnsupportedFieldError
from .field import Field
from .search import DEFAULT_NODE_BUDGET, search

log = logging.getLogger(__name__)

# (dim, largest p) pairs that run by default; anything else needs big=True
DEFAULT_BUDGET = {1: 7, 2: 7, 3: 5, 4: 2}


def iso_check(
    E1: EvolutionAlgebra, E2: EvolutionAlgebra, budget: int = DEFAULT_NODE_BUDGET
) -> Optional[IsoCertificate]:
    """A verified isomorphism E1 -> E2, or None if none exists."""
    if E1.field != E2.field:
        raise DimensionMismatchError("algebras live over different fields")
    if not E1.field.is_finite:
        raise UnsupportedFieldError("isomorphism search needs a finite field")
    if E1.dim != E2.dim or fingerprint(E1) != fingerprint(E2):
        return None
    for P in search(E1.field, E1.matrix, E2.matrix, budget=budget):
        cert = IsoCertificate(P)
        if not cert.verify(E1, E2):
            raise AssertionError("search produced an invalid certificate")
        return cert
    return None


def is_isomorphic(E1: EvolutionAlgebra, E2: EvolutionAlgebra) -> bool:
    return iso_check(E1, E2) is not None


def check_budget(F: Field, dim: int, big: bool = False) -> None:
    if not F.is_finite:
        raise UnsupportedFieldError("the oracle enumerates a finite field only")
    if big:
        return
    if dim not in DEFAULT_BUDGET or F.p > DEFAULT_BUDGET[dim]:
        raise BudgetExceededError(
            f"oracle over {F} in dim {dim} is outside the default budget; pass big=True (--big)"
        )


def all_structure_matrices(F: Field, dim: int) -> Iterator[tuple]:
    """Every dim x dim matrix over F, in lexicographic order of its entries."""
    for flat in itertools.product(range(F.p), repeat=dim * dim):
        yield tuple(flat[r * dim:(r + 1) * dim] for r in range(dim))


def nilpotent_matrices_naive(F: Field, dim: int) -> Iterator[tuple]:
    """Filter all p^(dim^2) matrices with the digraph acyclicity test."""
    for M in all_structure_matrices(F, dim):
        if _acyclic(EvolutionAlgebra(F, M)):
            yield M


@lru_cache(maxsize=None)
def acyclic_supports(dim: int) -> tuple[frozenset, ...]:
    """Off-diagonal-free arc sets on dim labelled vertices with no directed cycle."""
    cells = [(i, j) for i in range(dim) for j in range(dim)]
    out = []
    for mask in range(1 << len(cells)):
        arcs = frozenset(c for b, c in enumerate(cells) if mask >> b & 1)
        rows = tuple(tuple(1 if (i, j) in arcs else 0 for j in range(dim)) for i in range(dim))
        if _acyclic(EvolutionAlgebra(Field(2), rows)):
            out.append(arcs)
    return tuple(out)


def nilpotent_matrices(F: Field, dim: int) -> Iterator[tuple]:
    """Same set as :func:`nilpotent_matrices_naive`, in the same order.

    Nilpotency depends only on the support, so acyclic supports are listed
    first and then filled with nonzero values.
    """
    found = []
    nonzero = range(1, F.p)
    for arcs in acyclic_supports(dim):
        arcs = sorted(arcs)
        for vals in itertools.product(nonzero, repeat=len(arcs)):
            rows = [[0] * dim for _ in range(dim)]
            for (i, j), v in zip(arcs, vals):
                rows[i][j] = v
            found.append(tuple(tuple(r) for r in rows))
    found.sort()
    return iter(found)


def _classify_bucket(args) -> list[dict]:
    """Split one fingerprint bucket into isomorphism classes.

    Each matrix is compared with the current class representatives; since
    isomorphism is an equivalence relation this is union-find with the
    representative as root.  The reported representative is the
    lexicographically least member.
    """
    F, matrices, budget = args
    classes: list[dict] = []
    for M in matrices:
        E = EvolutionAlgebra(F, M)
        for cls in classes:
            if iso_check(cls["root"], E, budget=budget) is not None:
                cls["size"] += 1
                cls["min"] = min(cls["min"], M)
                break
        else:
            classes.append({"root": E, "min": M, "size": 1})
    return [{"matrix": c["min"], "size": c["size"]} for c in classes]


@dataclass
class OracleResult:
    field: Field
    dim: int
    representatives: list[EvolutionAlgebra]
    class_sizes: list[int]
    nilpotent_count: int
    stats: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.representatives)


def oracle_classify(
    F: Field,
    dim: int,
    big: bool = False,
    naive: bool = False,
    shuffle_seed: Optional[int] = None,
    threads: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
    checkpoint: Optional[Path] = None,
    checkpoint_every: int = 5000,
    resume: bool = False,
    progress: Optional[Callable[[int], None]] = None,
) -> OracleResult:
    """Isomorphism classes of nilpotent evolution algebras of a given dimension.

    ``naive`` walks all p^(dim^2) matrices instead of acyclic supports.
    ``shuffle_seed`` permutes the order in which matrices are merged; the
    output does not depend on it.  With ``checkpoint`` the bucketing phase
    saves its position and finished buckets to a JSON sidecar so a killed
    run can continue with ``resume=True``.
    """
    check_budget(F, dim, big)
    source = nilpotent_matrices_naive(F, dim) if naive else nilpotent_matrices(F, dim)
    state = {"position": 0, "buckets": {}, "done": {}}
    if resume and checkpoint and checkpoint.exists():
        state = _load_checkpoint(checkpoint, F, dim)
        log.info("resuming from candidate %d", state["position"])

    buckets: dict[str, list] = state["buckets"]
    position = state["position"]
    for idx, M in enumerate(source):
        if idx < position:
            continue
        key = json.dumps(list(fingerprint(EvolutionAlgebra(F, M))))
        buckets.setdefault(key, []).append(M)
        position = idx + 1
        if checkpoint and position % checkpoint_every == 0:
            _save_checkpoint(checkpoint, F, dim, position, buckets, state["done"])
            if progress:
                progress(position)

    rng = random.Random(shuffle_seed)
    jobs = []
    for key in sorted(buckets):
        mats = list(buckets[key])
        if shuffle_seed is not None:
            rng.shuffle(mats)
        jobs.append((key, (F, mats, budget)))

    done: dict[str, list] = state["done"]
    todo = [(k, a) for k, a in jobs if k not in done]
    if threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for (key, _), res in zip(todo, pool.map(_classify_bucket, [a for _, a in todo])):
                done[key] = res
    else:
        for key, args in todo:
            done[key] = _classify_bucket(args)
            if checkpoint:
                _save_checkpoint(checkpoint, F, dim, position, buckets, done)

    classes = sorted((tuple(map(tuple, c["matrix"])), c["size"]) for res in done.values() for c in res)
    return OracleResult(
        field=F,
        dim=dim,
        representatives=[EvolutionAlgebra(F, M) for M, _ in classes],
        class_sizes=[s for _, s in classes],
        nilpotent_count=position,
        stats={"buckets": len(buckets), "enumeration": "naive" if naive else "supports"},
    )


def _save_checkpoint(path: Path, F: Field, dim: int, position: int, buckets: dict, done: dict) -> None:
    data = {
        "field": str(F),
        "dim": dim,
        "position": position,
        "buckets": buckets,
        "done": done,
    }
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data))
    tmp.replace(path)


def _load_checkpoint(path: Path, F: Field, dim: int) -> dict:
    data = json.loads(path.read_text())
    if data["field"] != str(F) or data["dim"] != dim:
        raise ValueError(f"checkpoint {path} is for {data['field']} dim {data['dim']}")
    buckets = {k: [tuple(map(tuple, M)) for M in v] for k, v in data["buckets"].items()}
    done = {k: [{"matrix": tuple(map(tuple, c["matrix"])), "size": c["size"]} for c in v]
            for k, v in data["done"].items()}
    return {"position": data["position"], "buckets": buckets, "done": done}
