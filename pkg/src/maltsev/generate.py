"""Seeded random algebras and random members of Mal'tsev products."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, idempotent_elements
from .catalog import Catalog, generating_models
from .models import models_of
from .terms import Signature
from .variety import VarietySpec

#: Largest model size enumerated when sampling models of a base.
MODEL_SAMPLE_SIZE = 3


def random_algebra(sig: Signature, size: int, rng: np.random.Generator, name: str = "R") -> FiniteAlgebra:
    tables = {s: rng.integers(0, size, size=size**a) for s, a in sig.operations}
    return FiniteAlgebra(sig, size, tables, name=name)


def random_pairs(size: int, rng: np.random.Generator, max_pairs: int = 3) -> list[tuple[int, int]]:
    k = int(rng.integers(0, max_pairs + 1))
    return [tuple(int(v) for v in rng.integers(0, size, size=2)) for _ in range(k)]


def model_pool(V: VarietySpec, max_size: int = MODEL_SAMPLE_SIZE) -> list[FiniteAlgebra]:
    """Models of base(V) of size at most ``max_size``; catalog models of larger size are added."""
    pool = list(models_of(V.sig, V.base, max_size))
    if isinstance(V.decision, Catalog):
        seen = set(pool)
        for A in generating_models(V.decision, V.sig):
            if A not in seen:
                pool.append(A)
                seen.add(A)
    if not pool:
        raise ValueError(f"no models of {V.name} up to size {max_size}")
    return pool


def random_member(
    V: VarietySpec,
    W: VarietySpec,
    rng: np.random.Generator,
    max_size: int = 6,
    inner_pool: Sequence[FiniteAlgebra] | None = None,
    outer_pool: Sequence[FiniteAlgebra] | None = None,
    name: str = "M",
) -> FiniteAlgebra:
    """A random algebra of V∘W with at most ``max_size`` elements.

    Pick a model B of W; replace each idempotent b of B by a model A_b of V
    and every other element by a single point.  Operations on tuples lying
    in one A_b (b idempotent) are those of A_b; every other result is a
    random element of the block over the value in B.  The projection onto B
    is then a homomorphism, so the replica lies below its kernel, and every
    replica class that is a subalgebra sits inside some A_b.
    """
    inner_pool = list(inner_pool) if inner_pool is not None else model_pool(V)
    outer_pool = [B for B in (outer_pool if outer_pool is not None else model_pool(W)) if B.size <= max_size]
    if V.sig != W.sig:
        raise ValueError("V and W must have the same signature")
    for _ in range(1000):
        B = outer_pool[int(rng.integers(len(outer_pool)))]
        idem = idempotent_elements(B)
        budget = max_size - (B.size - len(idem))
        if budget < len(idem):
            continue
        parts: dict[int, FiniteAlgebra | None] = {}
        used = 0
        ok = True
        for b in range(B.size):
            if b in idem:
                room = budget - used - (len([c for c in idem if c > b]))
                choices = [A for A in inner_pool if A.size <= room]
                if not choices:
                    ok = False
                    break
                parts[b] = choices[int(rng.integers(len(choices)))]
                used += parts[b].size
            else:
                parts[b] = None
        if ok:
            return _assemble(B, parts, rng, name)
    raise ValueError("could not fit a member within the size bound")


def _assemble(B: FiniteAlgebra, parts: dict[int, FiniteAlgebra | None], rng, name: str) -> FiniteAlgebra:
    offset, owner = {}, []
    n = 0
    for b in range(B.size):
        offset[b] = n
        k = parts[b].size if parts[b] is not None else 1
        owner.extend([b] * k)
        n += k
    owner_arr = np.asarray(owner, dtype=np.int64)
    local = np.arange(n) - np.asarray([offset[b] for b in owner], dtype=np.int64)
    tables = {}
    for symbol, arity in B.sig.operations:
        grid = np.indices((n,) * arity).reshape(arity, -1)
        blocks = owner_arr[grid]
        target = B.tables[symbol][tuple(blocks)]
        sizes = np.asarray([parts[b].size if parts[b] is not None else 1 for b in range(B.size)])
        starts = np.asarray([offset[b] for b in range(B.size)])
        out = starts[target] + (rng.integers(0, 1 << 30, size=target.shape) % sizes[target])
        same = np.all(blocks == blocks[0], axis=0)
        for b, A in parts.items():
            if A is None:
                continue
            inside = same & (blocks[0] == b)
            if inside.any():
                idx = tuple(local[grid[:, inside]])
                out[inside] = offset[b] + A.tables[symbol][idx]
        tables[symbol] = out
    return FiniteAlgebra(B.sig, n, tables, name=name)
