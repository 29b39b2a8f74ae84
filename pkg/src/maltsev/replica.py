"""Replica congruences, the bounded pair relation behind them, and class structure."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    FiniteAlgebra,
    evaluate_array,
    idempotent_elements,
    is_subuniverse,
    odometer,
    quotient_algebra,
)
from .congruence import congruence_generated
from .partition import DisjointSet, Partition
from .terms import Term, enumerate_terms, ordered_variables, pretty
from .variety import VarietyError, VarietySpec, normal_form

#: Upper limit on the number of variables used by the bounded pair relation.
RHO0_MAX_VARIABLES = 3


def base_instance_pairs(A: FiniteAlgebra, W: VarietySpec) -> set[tuple[int, int]]:
    """All pairs (p(d), q(d)) for p = q in base(W) and every assignment d, with p(d) != q(d)."""
    pairs: set[tuple[int, int]] = set()
    for ident in W.base:
        names = ordered_variables(ident.lhs, ident.rhs)
        grid = odometer(A.size, len(names))
        env = {v: grid[i] for i, v in enumerate(names)}
        count = grid.shape[1]
        left = np.broadcast_to(evaluate_array(A, ident.lhs, env), (count,))
        right = np.broadcast_to(evaluate_array(A, ident.rhs, env), (count,))
        diff = left != right
        pairs.update(zip(left[diff].tolist(), right[diff].tolist()))
    return pairs


def replica_congruence(A: FiniteAlgebra, W: VarietySpec) -> Partition:
    """Least congruence of A whose quotient satisfies base(W)."""
    if A.sig != W.sig:
        raise VarietyError(f"algebra {A.name} and variety {W.name} have different signatures")
    return congruence_generated(A, base_instance_pairs(A, W))


# -- bounded pair relation -----------------------------------------------------


@dataclass(frozen=True)
class PairWitness:
    """An identity lhs = rhs of W and an assignment taking lhs to ``a`` and rhs to ``b``."""

    a: int
    b: int
    lhs: Term
    rhs: Term
    assignment: dict[str, int]

    def __hash__(self):
        return hash((self.a, self.b, self.lhs, self.rhs))


@dataclass
class BoundedRelation:
    """Pairs reached by W-identities between enumerated terms of size at most ``term_bound``."""

    n: int
    term_bound: int
    variables: tuple[str, ...]
    relation: np.ndarray
    witnesses: dict[tuple[int, int], PairWitness] = field(repr=False)
    terms_enumerated: int = 0

    def pairs(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in zip(*np.nonzero(self.relation))}

    def __contains__(self, pair) -> bool:
        a, b = pair
        return bool(self.relation[a, b])

    def closure(self) -> Partition:
        ds = DisjointSet(self.n)
        for a, b in zip(*np.nonzero(self.relation)):
            ds.union(int(a), int(b))
        return Partition(ds.labels())

    def is_transitive(self) -> bool:
        r = self.relation.astype(np.int64)
        return bool(np.all(((r @ r) > 0) <= self.relation))


def _default_variables(W: VarietySpec, term_bound: int) -> tuple[str, ...]:
    max_arity = max(a for _, a in W.sig.operations)
    m = min(term_bound * (max_arity - 1) + 1, RHO0_MAX_VARIABLES)
    return tuple(f"x{i}" for i in range(1, max(m, 1) + 1))


def rho0_bounded(
    A: FiniteAlgebra,
    W: VarietySpec,
    term_bound: int,
    variables: tuple[str, ...] | None = None,
) -> BoundedRelation:
    """Under-approximation of the relation of all pairs (p(d), q(d)) with W |= p = q.

    Terms range over the enumeration up to ``term_bound`` on ``variables``
    (default x1..xm with m = min(term_bound*(max arity - 1) + 1, 3)), and
    W-equivalence is read off normal forms, so W needs a catalog or an
    asserted rewrite system.
    """
    if not W.decidable:
        raise VarietyError(f"{W.name} has no decision procedure; the bounded relation needs one")
    if A.sig != W.sig:
        raise VarietyError(f"algebra {A.name} and variety {W.name} have different signatures")
    variables = tuple(variables) if variables is not None else _default_variables(W, term_bound)
    n = A.size
    terms = enumerate_terms(W.sig, variables, term_bound)
    groups: dict[Term, list[Term]] = {}
    for t in terms:
        groups.setdefault(normal_form(W, t), []).append(t)

    grid = odometer(n, len(variables))
    count = grid.shape[1]
    env = {v: grid[i] for i, v in enumerate(variables)}
    relation = np.eye(n, dtype=bool)
    witnesses: dict[tuple[int, int], PairWitness] = {}
    for c in range(n):
        x = terms[0]
        witnesses[(c, c)] = PairWitness(c, c, x, x, {v: c for v in variables})
    for members in groups.values():
        if len(members) < 2:
            continue
        values = np.stack([np.broadcast_to(evaluate_array(A, t, env), (count,)) for t in members])
        spread = np.flatnonzero((values != values[0]).any(axis=0))
        for d in spread.tolist():
            col = values[:, d]
            uniq, first = np.unique(col, return_index=True)
            for i, a in zip(first.tolist(), uniq.tolist()):
                for j, b in zip(first.tolist(), uniq.tolist()):
                    if a == b or relation[a, b]:
                        continue
                    relation[a, b] = True
                    asg = {v: int(grid[k, d]) for k, v in enumerate(variables)}
                    witnesses[(a, b)] = PairWitness(a, b, members[i], members[j], asg)
    return BoundedRelation(n, term_bound, variables, relation, witnesses, len(terms))


@dataclass
class ClosureProfile:
    replica: Partition
    closures: list[tuple[int, Partition]]
    stabilized_at: int | None

    def render(self, names=None) -> str:
        lines = [f"replica: {self.replica.render(names)}"]
        for bound, part in self.closures:
            mark = "=" if part == self.replica else "⊂"
            lines.append(f"  bound {bound}: closure {part.render(names)} {mark} replica")
        if self.stabilized_at is None:
            lines.append("  closure did not reach the replica within the bound")
        else:
            lines.append(f"  closure reached the replica at term bound {self.stabilized_at}")
        return "\n".join(lines)


def rho0_profile(A: FiniteAlgebra, W: VarietySpec, max_bound: int) -> ClosureProfile:
    """Transitive closures of the bounded relation for bounds 0..max_bound against the replica."""
    rho = replica_congruence(A, W)
    closures = []
    reached = None
    for bound in range(max_bound + 1):
        part = rho0_bounded(A, W, bound).closure()
        closures.append((bound, part))
        if reached is None and part == rho:
            reached = bound
    return ClosureProfile(rho, closures, reached)


# -- class structure -------------------------------------------------------------


@dataclass(frozen=True)
class BlockInfo:
    members: tuple[int, ...]
    is_subalgebra: bool
    is_singleton: bool
    is_idempotent_in_quotient: bool


@dataclass
class ClassStructureReport:
    algebra: FiniteAlgebra
    variety: str
    partition: Partition
    blocks: list[BlockInfo]

    @property
    def consistent(self) -> bool:
        return all(b.is_subalgebra == b.is_idempotent_in_quotient for b in self.blocks)

    def render(self) -> str:
        nm = self.algebra.element_name
        lines = [
            f"{self.variety}-replica of {self.algebra.name}: ϱ = {self.partition.render(self.algebra.names)}",
            f"{'class':<16} {'subalgebra':<11} {'singleton':<10} idempotent in A/ϱ",
        ]
        for b in self.blocks:
            label = "{" + ",".join(nm(x) for x in b.members) + "}"
            lines.append(
                f"{label:<16} {_yn(b.is_subalgebra):<11} {_yn(b.is_singleton):<10} "
                f"{_yn(b.is_idempotent_in_quotient)}"
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra.name,
            "variety": self.variety,
            "partition": self.partition.render(self.algebra.names),
            "blocks": [
                {
                    "members": [self.algebra.element_name(x) for x in b.members],
                    "is_subalgebra": b.is_subalgebra,
                    "is_singleton": b.is_singleton,
                    "is_idempotent_in_quotient": b.is_idempotent_in_quotient,
                }
                for b in self.blocks
            ],
        }


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def class_structure(A: FiniteAlgebra, W: VarietySpec) -> ClassStructureReport:
    rho = replica_congruence(A, W)
    Q = quotient_algebra(A, rho)
    idem = idempotent_elements(Q)
    blocks = [
        BlockInfo(tuple(b), is_subuniverse(A, b), len(b) == 1, i in idem)
        for i, b in enumerate(rho.blocks())
    ]
    return ClassStructureReport(A, W.name, rho, blocks)


def describe_witness(A: FiniteAlgebra, w: PairWitness) -> str:
    asg = ", ".join(f"{k}:{A.element_name(v)}" for k, v in w.assignment.items())
    return (
        f"({A.element_name(w.a)}, {A.element_name(w.b)}) via {pretty(w.lhs)} = {pretty(w.rhs)} at {{{asg}}}"
    )
