"""Congruences of finite algebras: generation, verification and the full lattice."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, compatible
from .partition import DisjointSet, Partition, join, meet

DEFAULT_CONGRUENCE_LIMIT = 8

__all__ = [
    "CongruenceLimitError",
    "DEFAULT_CONGRUENCE_LIMIT",
    "Partition",
    "all_congruences",
    "congruence_generated",
    "is_congruence",
    "join",
    "meet",
    "principal_congruence",
]


class CongruenceLimitError(ValueError):
    pass


def is_congruence(A: FiniteAlgebra, pi: Partition) -> bool:
    if pi.n != A.size:
        raise AlgebraError(f"partition on {pi.n} elements, algebra has {A.size}")
    return compatible(A, pi.labels)


def congruence_generated(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Partition:
    """Least congruence of A containing ``pairs``.

    The pairs seed a disjoint-set forest; then, until nothing changes, every
    argument is swapped for its class root in each operation and the two
    results are merged.  At the fixpoint each operation respects the classes
    one argument at a time, which is compatibility.
    """
    n = A.size
    ds = DisjointSet(n)
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise AlgebraError(f"pair ({a}, {b}) out of range")
        ds.union(int(a), int(b))
    tables = list(A.tables.values())
    changed = True
    while changed:
        changed = False
        lab = np.asarray(ds.labels(), dtype=np.int64)
        if (lab == np.arange(n)).all():
            break
        for t in tables:
            for axis in range(t.ndim):
                moved = np.take(t, lab, axis=axis)
                diff = moved != t
                if not diff.any():
                    continue
                for x, y in zip(t[diff].tolist(), moved[diff].tolist()):
                    if ds.union(x, y):
                        changed = True
    return Partition(ds.labels())


def principal_congruence(A: FiniteAlgebra, a: int, b: int) -> Partition:
    return congruence_generated(A, [(a, b)])


def all_congruences(A: FiniteAlgebra, limit: int = DEFAULT_CONGRUENCE_LIMIT) -> list[Partition]:
    """Every congruence of A, sorted with Δ first and ∇ last.

    Built as Δ plus all principal congruences, closed under joins (every
    congruence is the join of the principal congruences below it).
    """
    n = A.size
    if n > limit:
        raise CongruenceLimitError(f"algebra has {n} elements; congruence limit is {limit}")
    found = {Partition.identity(n)}
    principal = {principal_congruence(A, a, b) for a in range(n) for b in range(a + 1, n)}
    frontier = set(principal) - found
    found |= frontier
    while frontier:
        new = set()
        for p in frontier:
            for q in principal:
                r = join(p, q)
                if r not in found:
                    new.add(r)
        found |= new
        frontier = new
    return sorted(found, key=Partition.sort_key)
