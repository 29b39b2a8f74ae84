"""Backtracking enumeration of finite models of an equational base.

Operation tables are filled cell by cell (operations in declaration order,
cells in row-major order, values ascending), so models come out in a fixed
lexicographic order.  After every cell, each base identity is evaluated on
the assignments that are still undecided; a pair of defined but different
values prunes the branch.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .algebra import FiniteAlgebra, odometer, satisfies_identity
from .terms import Identity, Signature, Term, Var, ordered_variables


def _partial_eval(t: Term, env: dict[str, np.ndarray], tables: dict[str, np.ndarray], n: int):
    if isinstance(t, Var):
        return env[t.name]
    children = [_partial_eval(a, env, tables, n) for a in t.args]
    undefined = children[0] < 0
    idx = np.where(undefined, 0, children[0])
    for c in children[1:]:
        neg = c < 0
        undefined = undefined | neg
        idx = idx * n + np.where(neg, 0, c)
    out = tables[t.symbol][idx]
    out[undefined] = -1
    return out


class _Check:
    """One base identity with the assignments not yet settled."""

    def __init__(self, ident: Identity, n: int):
        self.lhs, self.rhs = ident.lhs, ident.rhs
        self.names = ordered_variables(ident.lhs, ident.rhs)
        self.grid = odometer(n, len(self.names))
        self.symbols = _symbols(ident.lhs) | _symbols(ident.rhs)

    def run(self, pending: np.ndarray, tables, n):
        """Return the still-pending indices, or None on a violation."""
        env = {v: self.grid[i, pending] for i, v in enumerate(self.names)}
        left = _partial_eval(self.lhs, env, tables, n)
        right = _partial_eval(self.rhs, env, tables, n)
        left = np.broadcast_to(left, pending.shape)
        right = np.broadcast_to(right, pending.shape)
        open_ = (left < 0) | (right < 0)
        if np.any(~open_ & (left != right)):
            return None
        return pending[open_]


def _symbols(t: Term) -> set[str]:
    if isinstance(t, Var):
        return set()
    out = {t.symbol}
    for a in t.args:
        out |= _symbols(a)
    return out


def enumerate_models(sig: Signature, base: Sequence[Identity], size: int) -> Iterator[FiniteAlgebra]:
    """All models of ``base`` on exactly ``size`` elements, in table-lexicographic order."""
    n = size
    tables = {s: np.full(n**a, -1, dtype=np.int64) for s, a in sig.operations}
    cells = [(s, i) for s, a in sig.operations for i in range(n**a)]
    checks = [_Check(ident, n) for ident in base]
    pending = []
    for c in checks:
        p = c.run(np.arange(c.grid.shape[1]), tables, n)
        if p is None:
            return
        pending.append(p)

    def dfs(depth: int, pending: list[np.ndarray]):
        if depth == len(cells):
            yield FiniteAlgebra(sig, n, {s: t.copy() for s, t in tables.items()}, name=f"M{n}")
            return
        symbol, i = cells[depth]
        table = tables[symbol]
        for value in range(n):
            table[i] = value
            nxt = []
            for c, p in zip(checks, pending):
                if symbol not in c.symbols or p.size == 0:
                    nxt.append(p)
                    continue
                q = c.run(p, tables, n)
                if q is None:
                    break
                nxt.append(q)
            else:
                yield from dfs(depth + 1, nxt)
        table[i] = -1

    yield from dfs(0, pending)


@lru_cache(maxsize=128)
def _models_cached(sig: Signature, base: tuple[Identity, ...], size: int) -> tuple[FiniteAlgebra, ...]:
    return tuple(enumerate_models(sig, base, size))


def models_of(sig: Signature, base: Sequence[Identity], max_size: int) -> list[FiniteAlgebra]:
    """All models of sizes 1..max_size (cached per signature, base and size)."""
    out: list[FiniteAlgebra] = []
    for n in range(1, max_size + 1):
        out.extend(_models_cached(sig, tuple(base), n))
    return out


def countermodel_search(
    sig: Signature, base: Sequence[Identity], ident: Identity, max_size: int
) -> tuple[FiniteAlgebra, dict[str, int]] | None:
    """First model of ``base`` (sizes 1..max_size, enumeration order) falsifying ``ident``.

    Streams the enumeration so the search stops at the first hit.
    """
    for n in range(1, max_size + 1):
        for A in enumerate_models(sig, base, n):
            ok, witness = satisfies_identity(A, ident)
            if not ok:
                return A, witness
    return None
