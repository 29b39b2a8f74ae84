"""Equivalence relations on {0, ..., n-1} in canonical form."""

from __future__ import annotations

from typing import Iterable, Sequence


class DisjointSet:
    """Union-find over 0..n-1 whose roots are always the least class member."""

    def __init__(self, n: int, labels: Sequence[int] | None = None):
        self.parent = list(range(n)) if labels is None else list(labels)

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def labels(self) -> tuple[int, ...]:
        return tuple(self.find(i) for i in range(len(self.parent)))


class Partition:
    """A partition of {0..n-1} stored as ``labels[i]`` = least member of i's block.

    Structural equality is equality of equivalence relations.  Blocks are
    ordered by their least member.
    """

    __slots__ = ("labels", "_blocks")

    def __init__(self, labels: Sequence[int]):
        labels = tuple(int(x) for x in labels)
        for i, r in enumerate(labels):
            if not (0 <= r <= i) or labels[r] != r:
                raise ValueError(f"not a canonical label vector: {labels}")
        self.labels = labels
        self._blocks = None

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        ds = DisjointSet(n)
        covered = set()
        for block in blocks:
            block = list(block)
            if not block:
                raise ValueError("empty block")
            for x in block:
                if not 0 <= x < n:
                    raise ValueError(f"element {x} out of range")
                if x in covered:
                    raise ValueError(f"element {x} in two blocks")
                covered.add(x)
                ds.union(block[0], x)
        return cls(ds.labels())

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Partition":
        """Equivalence relation generated by ``pairs`` (reflexive-symmetric-transitive closure)."""
        ds = DisjointSet(n)
        for a, b in pairs:
            ds.union(a, b)
        return cls(ds.labels())

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(range(n))

    @classmethod
    def total(cls, n: int) -> "Partition":
        return cls([0] * n)

    @property
    def n(self) -> int:
        return len(self.labels)

    def blocks(self) -> list[tuple[int, ...]]:
        if self._blocks is None:
            groups: dict[int, list[int]] = {}
            for i, r in enumerate(self.labels):
                groups.setdefault(r, []).append(i)
            self._blocks = [tuple(groups[r]) for r in sorted(groups)]
        return list(self._blocks)

    def block_of(self, x: int) -> tuple[int, ...]:
        r = self.labels[x]
        return next(b for b in self.blocks() if b[0] == r)

    def block_index(self) -> list[int]:
        """Map element -> position of its block in ``blocks()``."""
        pos = {b[0]: k for k, b in enumerate(self.blocks())}
        return [pos[r] for r in self.labels]

    def related(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    @property
    def num_blocks(self) -> int:
        return len(set(self.labels))

    @property
    def is_identity(self) -> bool:
        return self.labels == tuple(range(self.n))

    @property
    def is_total(self) -> bool:
        return all(r == 0 for r in self.labels)

    def pairs(self) -> Iterable[tuple[int, int]]:
        for b in self.blocks():
            for x in b:
                for y in b:
                    yield (x, y)

    def __le__(self, other: "Partition") -> bool:
        """Refinement: every block of self lies inside a block of other."""
        _same_universe(self, other)
        return all(other.labels[i] == other.labels[r] for i, r in enumerate(self.labels))

    def __eq__(self, other):
        return isinstance(other, Partition) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def sort_key(self):
        return (-self.num_blocks, self.labels)

    def render(self, names: Sequence[str] | None = None) -> str:
        def nm(i):
            return names[i] if names is not None else str(i)

        return "{" + ",".join("{" + ",".join(nm(i) for i in b) + "}" for b in self.blocks()) + "}"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Partition({self.render()})"


def _same_universe(p: Partition, q: Partition) -> None:
    if p.n != q.n:
        raise ValueError(f"partitions over different universes ({p.n} vs {q.n})")


def join(p: Partition, q: Partition) -> Partition:
    """Transitive closure of the union."""
    _same_universe(p, q)
    ds = DisjointSet(p.n, p.labels)
    for i, r in enumerate(q.labels):
        ds.union(i, r)
    return Partition(ds.labels())


def meet(p: Partition, q: Partition) -> Partition:
    """Blockwise intersection."""
    _same_universe(p, q)
    first: dict[tuple[int, int], int] = {}
    labels = []
    for i in range(p.n):
        key = (p.labels[i], q.labels[i])
        labels.append(first.setdefault(key, i))
    return Partition(labels)
