"""Backtracking search for structure-preserving basis changes over GF(p).

Finds invertible P (column i = image of e_i) with

    P(e_i) * P(e_j) = 0                  for i != j,
    P(e_i) * P(e_i) = P(e_i^2),

where the products are taken in the target algebra.  Optional extra diagonal
forms ``ortho`` add the constraint theta(P e_i, P e_j) = 0 for i != j, which
is exactly the condition defining the S_theta subset of Aut(E).

Images are assigned one basis vector at a time.  When the source digraph is
acyclic, sinks go first, so the required square of each new image is already
known and candidates are looked up by their square.

A source vector that never occurs in a square only has its own square and
its orthogonality to fix.  Neither depends on the annihilator coordinates
of its image (unless an ``ortho`` form reads them), and adding annihilator
images to it is a column operation that keeps P invertible.  Such images
are searched with zero annihilator part; full enumeration adds every
annihilator offset back afterwards.
"""

from __future__ import annotations

import graphlib
import itertools
from typing import Iterator, Sequence

from .errors import BudgetExceededError, DimensionMismatchError, UnsupportedFieldError
from .field import Field
from .linalg import nullspace

DEFAULT_NODE_BUDGET = 20_000_000


def _assignment_order(A: Sequence[Sequence[int]]) -> list[int]:
    m = len(A)
    graph = {i: {k for k in range(m) if A[i][k] and k != i} for i in range(m)}
    try:
        order = list(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError:
        ann = [i for i in range(m) if not any(A[i])]
        return ann + [i for i in range(m) if i not in ann]
    # annihilator vectors first (their candidate set is smallest), then the rest
    ann = [i for i in order if not any(A[i])]
    return ann + [i for i in order if any(A[i])]


def _kernel_set(p: int, functionals, m: int) -> frozenset:
    F = Field(p)
    basis = nullspace(F, [f for f in functionals if any(f)], m)
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        out.add(tuple(sum(c * b[k] for c, b in zip(coeffs, basis)) % p for k in range(m)))
    return frozenset(out)


def search(
    F: Field,
    A1: Sequence[Sequence[int]],
    A2: Sequence[Sequence[int]],
    ortho: Sequence[Sequence[int]] = (),
    find_all: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Iterator[tuple]:
    """Yield every (or the first) solution matrix P as a tuple of rows."""
    if not F.is_finite:
        raise UnsupportedFieldError("basis-change search needs a finite field")
    m = len(A1)
    if len(A2) != m:
        raise DimensionMismatchError("algebras have different dimensions")
    if m == 0:
        yield ()
        return
    p = F.p
    ann1 = {i for i in range(m) if not any(A1[i])}
    ann2 = [k for k in range(m) if not any(A2[k])]
    if len(ann1) != len(ann2):
        return
    live2 = [k for k in range(m) if any(A2[k])]
    ortho = [tuple(t) for t in ortho if any(t)]

    def square(v):
        out = [0] * m
        for k in live2:
            if v[k]:
                c = v[k] * v[k] % p
                row = A2[k]
                for j in range(m):
                    if row[j]:
                        out[j] = (out[j] + c * row[j]) % p
        return tuple(out)

    ann_vecs, by_square, nonann_vecs = [], {}, []
    for v in itertools.product(range(p), repeat=m):
        if not any(v):
            continue
        if all(v[k] == 0 for k in live2):
            ann_vecs.append(v)
        else:
            nonann_vecs.append(v)
            by_square.setdefault(square(v), []).append(v)

    ann2_set = set(ann2)
    free_ann = all(t[k] == 0 for t in ortho for k in ann2)
    reducible = {i for i in range(m) if free_ann and i not in ann1 and not any(row[i] for row in A1)}
    slim_vecs = [v for v in nonann_vecs if all(v[k] == 0 for k in ann2_set)]
    slim_by_square: dict = {}
    for v in slim_vecs:
        slim_by_square.setdefault(square(v), []).append(v)

    order = _assignment_order(A1)
    pos = {i: t for t, i in enumerate(order)}
    # square constraint of source index i becomes checkable at this step
    square_ready: dict[int, int] = {}
    for i in range(m):
        if i in ann1:
            continue
        deps = [pos[k] for k in range(m) if A1[i][k]] + [pos[i]]
        square_ready[i] = max(deps)
    ready_at = [[i for i, t in square_ready.items() if t == step] for step in range(m)]

    images: list = [None] * m
    nodes = 0

    # v and w multiply to zero (and are theta-orthogonal) exactly when the
    # coordinatewise product v*w lies in the kernel of these functionals
    functionals = [tuple(A2[k][j] for k in range(m)) for j in range(m)] + ortho
    kernel = _kernel_set(p, functionals, m)

    def compatible(v, w) -> bool:
        return tuple(a * b % p for a, b in zip(v, w)) in kernel

    def target_square(i):
        out = [0] * m
        for k in range(m):
            a = A1[i][k]
            if a:
                img = images[k]
                for j in range(m):
                    if img[j]:
                        out[j] = (out[j] + a * img[j]) % p
        return tuple(out)

    def reduce(v, echelon):
        v = list(v)
        for piv, row in echelon:
            c = v[piv]
            if c:
                v = [(x - c * y) % p for x, y in zip(v, row)]
        return v

    def rec(step, echelon):
        nonlocal nodes
        if step == m:
            yield tuple(tuple(images[i][r] for i in range(m)) for r in range(m))
            return
        i = order[step]
        pool, pool_by_square = (slim_vecs, slim_by_square) if i in reducible else (nonann_vecs, by_square)
        if i in ann1:
            cands = ann_vecs
        elif square_ready[i] == step and all(images[k] is not None for k in range(m) if A1[i][k] and k != i):
            if A1[i][i]:
                cands = pool
            else:
                cands = pool_by_square.get(target_square(i), ())
        else:
            cands = pool
        for v in cands:
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(f"search exceeded {budget} nodes")
            if not all(compatible(v, images[order[t]]) for t in range(step)):
                continue
            red = reduce(v, echelon)
            piv = next((k for k, x in enumerate(red) if x), None)
            if piv is None:
                continue
            images[i] = v
            if all(square(images[j]) == target_square(j) for j in ready_at[step]):
                inv = pow(red[piv], -1, p)
                new_row = [x * inv % p for x in red]
                yield from rec(step + 1, echelon + [(piv, new_row)])
            images[i] = None

    offsets = [tuple([0] * m)] + ann_vecs
    moved = sorted(reducible)
    for sol in rec(0, []):
        if not find_all:
            yield sol
            return
        cols = [tuple(sol[r][i] for r in range(m)) for i in range(m)]
        for shift in itertools.product(offsets, repeat=len(moved)):
            new = list(cols)
            for i, a in zip(moved, shift):
                new[i] = tuple((x + y) % p for x, y in zip(cols[i], a))
            yield tuple(tuple(new[i][r] for i in range(m)) for r in range(m))
