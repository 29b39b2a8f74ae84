"""Mal'tsev product membership, quotient probing and the substituted identity sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import islice, product as cartesian
from typing import Iterator, Sequence

import numpy as np

from .algebra import (
    FiniteAlgebra,
    evaluate,
    evaluate_array,
    is_subuniverse,
    odometer,
    quotient_algebra,
    satisfies_identity,
)
from .congruence import DEFAULT_CONGRUENCE_LIMIT, all_congruences
from .partition import Partition
from .replica import replica_congruence
from .terms import Identity, Term, enumerate_terms, ordered_variables, pretty, substitute
from .variety import VarietyError, VarietySpec, is_term_idempotent, normal_form


_CHUNK = 8192


class Membership(str, Enum):
    MEMBER = "member"
    NOT_MEMBER = "not-member"
    UNKNOWN = "unknown"


@dataclass
class BlockCheck:
    block: tuple[int, ...]
    results: list[tuple[Identity, bool, dict[str, int] | None]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.results)


@dataclass
class MembershipReport:
    """Outcome of testing A against the Mal'tsev product V∘W.

    The test is exact: the replica is computed from the finite base of W and
    every class that is a subalgebra is checked exhaustively against base(V).
    """

    algebra: FiniteAlgebra
    inner: str
    outer: str
    verdict: Membership
    replica: Partition
    checks: list[BlockCheck]
    failing_block: tuple[int, ...] | None = None
    failing_identity: Identity | None = None
    failing_assignment: dict[str, int] | None = None

    @property
    def is_member(self) -> bool:
        return self.verdict is Membership.MEMBER

    def recheck(self) -> bool:
        """A not-member verdict re-evaluates its failing identity to unequal values on the block."""
        if self.verdict is not Membership.NOT_MEMBER:
            return True
        A, ident, asg = self.algebra, self.failing_identity, self.failing_assignment
        if not set(asg.values()) <= set(self.failing_block):
            return False
        return evaluate(A, ident.lhs, asg) != evaluate(A, ident.rhs, asg)

    def render(self) -> str:
        A = self.algebra
        lines = [
            f"{A.name} ∈ {self.inner}∘{self.outer}: {self.verdict.value}",
            f"  {self.outer}-replica ϱ = {self.replica.render(A.names)}",
        ]
        for chk in self.checks:
            label = "{" + ",".join(A.element_name(x) for x in chk.block) + "}"
            status = "in " + self.inner if chk.passed else "NOT in " + self.inner
            lines.append(f"  subalgebra class {label}: {status}")
        if self.verdict is Membership.NOT_MEMBER:
            asg = ", ".join(f"{k}:{A.element_name(v)}" for k, v in self.failing_assignment.items())
            lhs = evaluate(A, self.failing_identity.lhs, self.failing_assignment)
            rhs = evaluate(A, self.failing_identity.rhs, self.failing_assignment)
            lines.append(
                f"  fails {self.failing_identity.pretty()} at {{{asg}}}: "
                f"{A.element_name(lhs)} ≠ {A.element_name(rhs)}"
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        A = self.algebra
        out = {
            "algebra": A.name,
            "inner": self.inner,
            "outer": self.outer,
            "verdict": self.verdict.value,
            "replica": self.replica.render(A.names),
            "subalgebra_classes": [
                {
                    "class": [A.element_name(x) for x in chk.block],
                    "checks": [
                        {"identity": str(i), "holds": ok, "witness": w} for i, ok, w in chk.results
                    ],
                }
                for chk in self.checks
            ],
        }
        if self.verdict is Membership.NOT_MEMBER:
            out["failing_class"] = [A.element_name(x) for x in self.failing_block]
            out["failing_identity"] = str(self.failing_identity)
            out["failing_assignment"] = {
                k: A.element_name(v) for k, v in self.failing_assignment.items()
            }
        return out


def _same_type(A: FiniteAlgebra, *varieties: VarietySpec) -> None:
    for V in varieties:
        if V.sig != A.sig:
            raise VarietyError(f"algebra {A.name} and variety {V.name} have different signatures")


def member(A: FiniteAlgebra, V: VarietySpec, W: VarietySpec) -> MembershipReport:
    """Decide A ∈ V∘W: every W-replica class that is a subalgebra must satisfy base(V)."""
    _same_type(A, V, W)
    rho = replica_congruence(A, W)
    checks = []
    failure = None
    for block in rho.blocks():
        if not is_subuniverse(A, block):
            continue
        results = []
        for ident in V.base:
            ok, witness = satisfies_identity(A, ident, elements=block)
            results.append((ident, ok, witness))
            if not ok and failure is None:
                failure = (tuple(block), ident, witness)
        checks.append(BlockCheck(tuple(block), results))
    if failure is None:
        return MembershipReport(A, V.name, W.name, Membership.MEMBER, rho, checks)
    block, ident, witness = failure
    return MembershipReport(A, V.name, W.name, Membership.NOT_MEMBER, rho, checks, block, ident, witness)


@dataclass
class ProbeResult:
    algebra: FiniteAlgebra
    inner: str
    outer: str
    base_report: MembershipReport
    entries: list[tuple[Partition, MembershipReport]]

    @property
    def violations(self) -> list[tuple[Partition, MembershipReport]]:
        """Congruences whose quotient leaves V∘W while A itself is a member."""
        if not self.base_report.is_member:
            return []
        return [(t, r) for t, r in self.entries if not r.is_member]

    def render(self) -> str:
        A = self.algebra
        lines = [
            f"H-closure probe of {A.name} for {self.inner}∘{self.outer}: "
            f"{len(self.entries)} congruences, {len(self.violations)} violating"
        ]
        if not self.base_report.is_member:
            lines.append(f"  note: {A.name} itself is not a member; nothing to probe")
        for theta, rep in self.entries:
            tag = "VIOLATION" if (self.base_report.is_member and not rep.is_member) else "ok"
            lines.append(f"  θ = {theta.render(A.names)}: {rep.verdict.value} [{tag}]")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        A = self.algebra
        return {
            "algebra": A.name,
            "inner": self.inner,
            "outer": self.outer,
            "algebra_is_member": self.base_report.is_member,
            "violations": [t.render(A.names) for t, _ in self.violations],
            "quotients": [
                {"theta": t.render(A.names), "verdict": r.verdict.value} for t, r in self.entries
            ],
        }


def h_closure_probe(
    A: FiniteAlgebra,
    V: VarietySpec,
    W: VarietySpec,
    limit: int = DEFAULT_CONGRUENCE_LIMIT,
) -> ProbeResult:
    """Membership of A/θ for every congruence θ; violations come first, then canonical order."""
    base = member(A, V, W)
    entries = []
    for theta in all_congruences(A, limit):
        Q = quotient_algebra(A, theta, name=f"{A.name}/θ")
        entries.append((theta, member(Q, V, W)))
    entries.sort(key=lambda e: (e[1].is_member, e[0].sort_key()))
    return ProbeResult(A, V.name, W.name, base, entries)


# -- substituted identities ----------------------------------------------------------


@dataclass
class SigmaW:
    """A truncation of the identities obtained by substituting W-equivalent term idempotents.

    ``classes`` holds the W-classes (by normal form) of enumerated term
    idempotents; every tuple drawn from one class is substituted into every
    identity of ``sigma``.
    """

    sigma: tuple[Identity, ...]
    outer: str
    term_bound: int
    variables: tuple[str, ...]
    classes: list[tuple[Term, ...]]
    terms_enumerated: int
    rejected_classes: int
    _identities: list[Identity] | None = field(default=None, repr=False)

    def instances(self) -> Iterator[tuple[Identity, tuple[Term, ...]]]:
        """Every (source identity, substituted tuple), before deduplication."""
        for ident in self.sigma:
            names = ordered_variables(ident.lhs, ident.rhs)
            for cls in self.classes:
                for rs in cartesian(cls, repeat=len(names)):
                    yield ident, rs

    @property
    def candidate_count(self) -> int:
        total = 0
        for ident in self.sigma:
            k = len(ordered_variables(ident.lhs, ident.rhs))
            total += sum(len(c) ** k for c in self.classes)
        return total

    def iter_identities(self) -> Iterator[Identity]:
        """Substituted identities, deduplicated up to renaming, in generation order."""
        seen = set()
        for ident, rs in self.instances():
            names = ordered_variables(ident.lhs, ident.rhs)
            s = dict(zip(names, rs))
            new = Identity(substitute(ident.lhs, s), substitute(ident.rhs, s))
            if new not in seen:
                seen.add(new)
                yield new

    @property
    def identities(self) -> list[Identity]:
        if self._identities is None:
            self._identities = list(self.iter_identities())
        return self._identities

    def metadata(self) -> dict:
        return {
            "term_bound": self.term_bound,
            "variables": list(self.variables),
            "terms_enumerated": self.terms_enumerated,
            "term_idempotent_classes": len(self.classes),
            "rejected_classes": self.rejected_classes,
            "candidates": self.candidate_count,
        }

    def holds_in(self, A: FiniteAlgebra) -> tuple[bool, tuple[Identity, tuple[Term, ...], dict] | None]:
        """Check every substituted identity in A at once.

        The values of the substituted terms are computed once per term; the
        value of u(r_1..r_n) at an assignment d is then u evaluated at
        (r_1(d), ..., r_n(d)).  Returns the first failure in instance order.
        """
        grid = odometer(A.size, len(self.variables))
        count = grid.shape[1]
        env = {v: grid[i] for i, v in enumerate(self.variables)}
        for ident in self.sigma:
            names = ordered_variables(ident.lhs, ident.rhs)
            k = len(names)
            for cls in self.classes:
                vals = np.stack(
                    [np.broadcast_to(evaluate_array(A, t, env), (count,)) for t in cls]
                )
                combos = odometer(len(cls), k)  # (k, len(cls)**k)
                for start in range(0, combos.shape[1], _CHUNK):
                    part = combos[:, start : start + _CHUNK]
                    shape = (part.shape[1], count)
                    sub_env = {v: vals[part[i]] for i, v in enumerate(names)}
                    left = np.broadcast_to(evaluate_array(A, ident.lhs, sub_env), shape)
                    right = np.broadcast_to(evaluate_array(A, ident.rhs, sub_env), shape)
                    bad = np.argwhere(left != right)
                    if bad.size:
                        c, d = (int(x) for x in bad[0])
                        rs = tuple(cls[part[i, c]] for i in range(k))
                        asg = {v: int(grid[i, d]) for i, v in enumerate(self.variables)}
                        return False, (ident, rs, asg)
        return True, None

    def render(self, limit: int = 20) -> str:
        meta = self.metadata()
        lines = [
            f"Σ^{self.outer} truncated at term size {self.term_bound} over {', '.join(self.variables)}: "
            f"{meta['term_idempotent_classes']} classes of term idempotents, {meta['candidates']} substitutions",
        ]
        shown = list(islice(self.iter_identities(), limit))
        lines.append(f"  first {len(shown)} distinct identities:")
        lines += [f"  {i.pretty()}" for i in shown]
        return "\n".join(lines)


def sigma_w(
    sigma: Sequence[Identity],
    W: VarietySpec,
    term_bound: int,
    variables: Sequence[str] = ("x", "y"),
) -> SigmaW:
    """Substitute tuples of pairwise W-equivalent term idempotents into each identity of sigma.

    Terms range over the enumeration up to ``term_bound`` on ``variables``.
    Term idempotency is checked on one representative per W-class, which is
    enough because it is invariant under W-equivalence.
    """
    if not W.decidable:
        raise VarietyError(f"{W.name} has no decision procedure; cannot enumerate W-classes")
    terms = enumerate_terms(W.sig, tuple(variables), term_bound)
    groups: dict[Term, list[Term]] = {}
    for t in terms:
        groups.setdefault(normal_form(W, t), []).append(t)
    classes = []
    rejected = 0
    for members in groups.values():
        if is_term_idempotent(W, members[0], model_bound=0).proved:
            classes.append(tuple(members))
        else:
            rejected += 1
    return SigmaW(tuple(sigma), W.name, term_bound, tuple(variables), classes, len(terms), rejected)


def describe_instance(ident: Identity, rs: Sequence[Term]) -> str:
    names = ordered_variables(ident.lhs, ident.rhs)
    subst = ", ".join(f"{v}↦{pretty(r)}" for v, r in zip(names, rs))
    return f"{ident.pretty()} with {{{subst}}}"
