"""Finite algebras given by dense operation tables."""

from __future__ import annotations

from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .partition import Partition
from .terms import Identity, Signature, Term, Var, ordered_variables


class AlgebraError(ValueError):
    pass


class FiniteAlgebra:
    """An algebra on {0..n-1}.

    ``tables[symbol]`` is an integer array of shape ``(n,) * arity`` (row-major,
    last index fastest when flattened).  Arrays are made read-only.
    """

    def __init__(
        self,
        sig: Signature,
        size: int,
        tables: Mapping[str, Sequence[int] | np.ndarray],
        names: Sequence[str] | None = None,
        name: str = "A",
    ):
        if size < 1:
            raise AlgebraError("an algebra needs at least one element")
        self.sig = sig
        self.size = int(size)
        self.name = name
        if names is not None:
            names = tuple(str(x) for x in names)
            if len(names) != size or len(set(names)) != size:
                raise AlgebraError("element names must be distinct, one per element")
        self.names = names
        self.tables: dict[str, np.ndarray] = {}
        for symbol, arity in sig.operations:
            if symbol not in tables:
                raise AlgebraError(f"missing table for {symbol!r}")
            arr = np.asarray(tables[symbol], dtype=np.int64).reshape((size,) * arity)
            if arr.size and (arr.min() < 0 or arr.max() >= size):
                raise AlgebraError(f"table entry out of range in {symbol!r}")
            arr = arr.copy()
            arr.setflags(write=False)
            self.tables[symbol] = arr
        extra = set(tables) - set(sig.symbols)
        if extra:
            raise AlgebraError(f"tables for undeclared symbols {sorted(extra)}")

    @classmethod
    def from_functions(cls, sig, size, funcs: Mapping[str, Callable[..., int]], names=None, name="A"):
        tables = {}
        for symbol, arity in sig.operations:
            fn = funcs[symbol]
            tables[symbol] = [fn(*args) for args in product(range(size), repeat=arity)]
        return cls(sig, size, tables, names=names, name=name)

    def element_name(self, i: int) -> str:
        return self.names[i] if self.names is not None else str(i)

    def element(self, label: str | int) -> int:
        if isinstance(label, (int, np.integer)):
            return int(label)
        if self.names is not None and label in self.names:
            return self.names.index(label)
        if label.isdigit() and int(label) < self.size:
            return int(label)
        raise AlgebraError(f"unknown element {label!r}")

    def apply(self, symbol: str, *args: int) -> int:
        return int(self.tables[symbol][args])

    def flat_table(self, symbol: str) -> list[int]:
        return [int(x) for x in self.tables[symbol].ravel()]

    def table_key(self) -> tuple:
        return (self.size, tuple(tuple(self.flat_table(s)) for s in self.sig.symbols))

    def __eq__(self, other):
        return (
            isinstance(other, FiniteAlgebra)
            and self.sig == other.sig
            and self.table_key() == other.table_key()
        )

    def __hash__(self):
        return hash(self.table_key())

    def __repr__(self):
        return f"FiniteAlgebra({self.name!r}, size={self.size})"

    def render(self) -> str:
        """Cayley-style tables for binary operations, value lists otherwise."""
        nm = self.element_name
        width = max(len(nm(i)) for i in range(self.size))
        lines = [f"{self.name} (size {self.size})"]
        for symbol, arity in self.sig.operations:
            t = self.tables[symbol]
            if arity == 2:
                lines.append(f"{symbol:>{width}} | " + " ".join(f"{nm(j):>{width}}" for j in range(self.size)))
                lines.append("-" * (width + 3 + (width + 1) * self.size))
                for i in range(self.size):
                    row = " ".join(f"{nm(int(t[i, j])):>{width}}" for j in range(self.size))
                    lines.append(f"{nm(i):>{width}} | {row}")
            else:
                for args in product(range(self.size), repeat=arity):
                    argtxt = ",".join(nm(a) for a in args)
                    lines.append(f"{symbol}({argtxt}) = {nm(int(t[args]))}")
        return "\n".join(lines)


Assignment = Mapping[str, int]


def evaluate(A: FiniteAlgebra, t: Term, asg: Assignment) -> int:
    """Value of the term function t^A at the assignment."""
    if isinstance(t, Var):
        try:
            return int(asg[t.name])
        except KeyError:
            raise AlgebraError(f"unassigned variable {t.name!r}") from None
    table = A.tables.get(t.symbol)
    if table is None or table.ndim != len(t.args):
        raise AlgebraError(f"symbol {t.symbol!r} not in the algebra's signature")
    return int(table[tuple(evaluate(A, a, asg) for a in t.args)])


def evaluate_array(A: FiniteAlgebra, t: Term, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorised evaluation: every variable maps to an array of elements of one shape."""
    cache: dict[Term, np.ndarray] = {}

    def go(s: Term) -> np.ndarray:
        hit = cache.get(s)
        if hit is not None:
            return hit
        if isinstance(s, Var):
            try:
                out = env[s.name]
            except KeyError:
                raise AlgebraError(f"unassigned variable {s.name!r}") from None
        else:
            table = A.tables.get(s.symbol)
            if table is None or table.ndim != len(s.args):
                raise AlgebraError(f"symbol {s.symbol!r} not in the algebra's signature")
            out = table[tuple(go(a) for a in s.args)]
        cache[s] = out
        return out

    return go(t)


GRID_LIMIT = 1 << 20


def odometer(n: int, k: int) -> np.ndarray:
    """All k-tuples over 0..n-1 as a (k, n**k) array; the last coordinate varies fastest."""
    if k == 0:
        return np.zeros((0, 1), dtype=np.int64)
    return np.indices((n,) * k, dtype=np.int64).reshape(k, -1)


def satisfies_identity(
    A: FiniteAlgebra, ident: Identity, elements: Sequence[int] | None = None
) -> tuple[bool, dict[str, int] | None]:
    """Exhaustive check of ``A |= lhs = rhs``.

    With ``elements`` the variables range over that subset only (used for
    checking blocks that are subalgebras).  On failure the first falsifying
    assignment in odometer order over the identity's variables is returned.
    """
    names = ordered_variables(ident.lhs, ident.rhs)
    universe = np.arange(A.size) if elements is None else np.asarray(sorted(elements), dtype=np.int64)
    n = len(universe)
    # leading variables are looped over so that each batch stays below GRID_LIMIT assignments
    inner = len(names)
    while inner > 0 and n**inner > GRID_LIMIT:
        inner -= 1
    outer = len(names) - inner
    grid = universe[odometer(n, inner)]
    count = grid.shape[1]
    for head in product(range(n), repeat=outer):
        env = {v: np.full(count, universe[i]) for v, i in zip(names, head)}
        env.update({v: grid[i] for i, v in enumerate(names[outer:])})
        left = _broadcast(evaluate_array(A, ident.lhs, env), count)
        right = _broadcast(evaluate_array(A, ident.rhs, env), count)
        bad = np.flatnonzero(left != right)
        if bad.size:
            k = int(bad[0])
            return False, {v: int(env[v][k]) for v in names}
    return True, None


def _broadcast(values, count: int) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim == 0:
        return np.full(count, int(values))
    return values


def idempotent_elements(A: FiniteAlgebra) -> set[int]:
    out = set()
    for c in range(A.size):
        if all(int(t[(c,) * t.ndim]) == c for t in A.tables.values()):
            out.add(c)
    return out


def subuniverse_generated(A: FiniteAlgebra, S: Iterable[int]) -> set[int]:
    """Least subset containing S closed under all operations."""
    current = set(int(x) for x in S)
    if not current:
        raise AlgebraError("generating set must be nonempty")
    while True:
        idx = np.array(sorted(current), dtype=np.int64)
        new = set()
        for t in A.tables.values():
            values = t[np.ix_(*([idx] * t.ndim))]
            new.update(int(v) for v in np.unique(values))
        if new <= current:
            return current
        current |= new


def is_subuniverse(A: FiniteAlgebra, S: Iterable[int]) -> bool:
    S = set(S)
    return bool(S) and subuniverse_generated(A, S) == S


def subalgebra(A: FiniteAlgebra, S: Iterable[int], name: str | None = None) -> FiniteAlgebra:
    """The subalgebra on a closed subset, elements renumbered in ascending order."""
    elems = sorted(set(S))
    if not is_subuniverse(A, elems):
        raise AlgebraError("subset is not closed under the operations")
    pos = {e: i for i, e in enumerate(elems)}
    idx = np.array(elems, dtype=np.int64)
    tables = {}
    for symbol, t in A.tables.items():
        sub = t[np.ix_(*([idx] * t.ndim))]
        tables[symbol] = np.vectorize(pos.__getitem__, otypes=[np.int64])(sub) if sub.size else sub
    names = [A.element_name(e) for e in elems]
    return FiniteAlgebra(A.sig, len(elems), tables, names=names, name=name or f"{A.name}|sub")


def compatible(A: FiniteAlgebra, labels: Sequence[int]) -> bool:
    """True iff the equivalence with the given canonical labels is compatible with every operation."""
    lab = np.asarray(labels, dtype=np.int64)
    if lab.shape != (A.size,):
        raise AlgebraError("partition size does not match the algebra")
    for t in A.tables.values():
        lt = lab[t]
        for axis in range(t.ndim):
            if not np.array_equal(np.take(lt, lab, axis=axis), lt):
                return False
    return True


def quotient_algebra(A: FiniteAlgebra, theta: Partition, name: str | None = None) -> FiniteAlgebra:
    """A/theta with blocks numbered by ascending least member.

    Singleton blocks keep the element's name; larger blocks are named like
    ``{e,f}``.
    """
    if theta.n != A.size:
        raise AlgebraError("partition size does not match the algebra")
    if not compatible(A, theta.labels):
        raise AlgebraError(f"{theta.render(A.names)} is not a congruence")
    blocks = theta.blocks()
    index = np.asarray(theta.block_index(), dtype=np.int64)
    reps = np.array([b[0] for b in blocks], dtype=np.int64)
    tables = {}
    for symbol, t in A.tables.items():
        tables[symbol] = index[t[np.ix_(*([reps] * t.ndim))]]
    names = []
    for b in blocks:
        if len(b) == 1:
            names.append(A.element_name(b[0]))
        else:
            names.append("{" + ",".join(A.element_name(x) for x in b) + "}")
    return FiniteAlgebra(A.sig, len(blocks), tables, names=names, name=name or f"{A.name}/θ")


def direct_product(A: FiniteAlgebra, B: FiniteAlgebra, name: str | None = None) -> FiniteAlgebra:
    """Componentwise product; the pair (i, j) is encoded as ``i * |B| + j``."""
    if A.sig != B.sig:
        raise AlgebraError("signature mismatch")
    n, m = A.size, B.size
    tables = {}
    for symbol, arity in A.sig.operations:
        ta, tb = A.tables[symbol], B.tables[symbol]
        grid = odometer(n * m, arity)
        first = tuple(grid // m)
        second = tuple(grid % m)
        tables[symbol] = ta[first] * m + tb[second]
    names = None
    if A.names is not None or B.names is not None:
        names = [f"({A.element_name(i)},{B.element_name(j)})" for i in range(n) for j in range(m)]
    return FiniteAlgebra(A.sig, n * m, tables, names=names, name=name or f"{A.name}×{B.name}")


def disjoint_union_unary(parts: Sequence[FiniteAlgebra], name: str = "A") -> FiniteAlgebra:
    """Disjoint union of algebras whose operations are all unary."""
    sig = parts[0].sig
    if any(a != 1 for _, a in sig.operations):
        raise AlgebraError("disjoint union needs a unary signature")
    tables = {s: [] for s in sig.symbols}
    offset = 0
    for P in parts:
        for s in sig.symbols:
            tables[s].extend(int(v) + offset for v in P.tables[s])
        offset += P.size
    return FiniteAlgebra(sig, offset, tables, name=name)


def one_element(sig: Signature, name: str = "1") -> FiniteAlgebra:
    return FiniteAlgebra(sig, 1, {s: [0] for s in sig.symbols}, name=name)
