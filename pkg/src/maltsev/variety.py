"""Finitely based varieties and a three-valued identity decision service."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .algebra import FiniteAlgebra, evaluate, satisfies_identity
from .catalog import (
    Catalog,
    catalog_base,
    catalog_countermodel,
    default_signature,
    normal_form as _catalog_nf,
    parse_tag,
)
from .models import countermodel_search as _search
from .terms import (
    App,
    Identity,
    Signature,
    Term,
    check_term,
    format_term,
    match_instance,
    pretty,
    substitute,
    term_at,
    variables_of,
)

DEFAULT_MODEL_BOUND = 4
DEFAULT_TERM_BOUND = 6
REWRITE_STEP_LIMIT = 10_000


class VarietyError(ValueError):
    pass


@dataclass(frozen=True)
class AssertedRewrite:
    """Oriented rules the user asserts to be terminating and confluent."""

    rules: tuple[tuple[Term, Term], ...]

    def __post_init__(self):
        for lhs, rhs in self.rules:
            if lhs.is_var:
                raise VarietyError(f"rule with a variable left side: {lhs} -> {rhs}")
            if not variables_of(rhs) <= variables_of(lhs):
                raise VarietyError(f"rule introduces variables: {lhs} -> {rhs}")


@dataclass(frozen=True)
class Generic:
    pass


Decision = Catalog | AssertedRewrite | Generic


@dataclass(frozen=True)
class VarietySpec:
    name: str
    sig: Signature
    base: tuple[Identity, ...]
    decision: Decision = field(default_factory=Generic)

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        for ident in self.base:
            check_term(ident.lhs, self.sig)
            check_term(ident.rhs, self.sig)
        if isinstance(self.decision, AssertedRewrite):
            for lhs, rhs in self.decision.rules:
                check_term(lhs, self.sig)
                check_term(rhs, self.sig)

    @property
    def decidable(self) -> bool:
        return not isinstance(self.decision, Generic)

    def __str__(self):
        return self.name


def catalog_variety(tag: str | Catalog, sig: Signature | None = None, name: str | None = None) -> VarietySpec:
    cat = parse_tag(tag) if isinstance(tag, str) else tag
    sig = sig or default_signature(cat)
    return VarietySpec(name or cat.label, sig, tuple(catalog_base(cat, sig)), cat)


class Status(str, Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    """Outcome of deciding ``lhs = rhs`` in a variety.

    Proved carries ``evidence`` (normal forms or a derivation); Refuted
    carries a finite ``model`` of the base and a ``witness`` assignment on
    which the two sides differ; Unknown records the ``bounds`` used.
    """

    status: Status
    lhs: Term
    rhs: Term
    evidence: str = ""
    model: FiniteAlgebra | None = None
    witness: dict[str, int] | None = None
    bounds: dict | None = None
    parts: list["Verdict"] = field(default_factory=list)

    @property
    def proved(self) -> bool:
        return self.status is Status.PROVED

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    @property
    def identity(self) -> Identity:
        return Identity(self.lhs, self.rhs)

    def recheck(self, V: "VarietySpec") -> bool:
        """For Refuted: the model satisfies base(V) and the witness separates the sides."""
        if not self.refuted:
            return True
        if self.model is None or self.witness is None:
            return False
        if not all(satisfies_identity(self.model, b)[0] for b in V.base):
            return False
        return evaluate(self.model, self.lhs, self.witness) != evaluate(self.model, self.rhs, self.witness)

    def summary(self) -> str:
        head = f"{self.status.value}: {pretty(self.lhs)} = {pretty(self.rhs)}"
        if self.proved and self.evidence:
            return f"{head}  [{self.evidence}]"
        if self.refuted and self.model is not None:
            wit = ", ".join(f"{k}:{self.model.element_name(v)}" for k, v in self.witness.items())
            return (
                f"{head}  [countermodel {self.model.name} of size {self.model.size}; "
                f"{{{wit}}}: {self.model.element_name(evaluate(self.model, self.lhs, self.witness))} ≠ "
                f"{self.model.element_name(evaluate(self.model, self.rhs, self.witness))}]"
            )
        if self.unknown:
            return f"{head}  [{self.evidence or 'no decision'}; bounds {self.bounds}]"
        return head

    def to_dict(self) -> dict:
        out = {
            "status": self.status.value,
            "lhs": format_term(self.lhs),
            "rhs": format_term(self.rhs),
            "evidence": self.evidence,
        }
        if self.model is not None:
            from .fileio import algebra_to_dict

            out["model"] = algebra_to_dict(self.model)
            out["witness"] = dict(self.witness or {})
        if self.bounds is not None:
            out["bounds"] = dict(self.bounds)
        if self.parts:
            out["parts"] = [p.to_dict() for p in self.parts]
        return out


def conjunction(lhs: Term, rhs: Term, parts: Sequence[Verdict], label: str = "") -> Verdict:
    """Proved iff all parts are Proved; Refuted if any is; else Unknown."""
    parts = list(parts)
    for p in parts:
        if p.refuted:
            return Verdict(Status.REFUTED, p.lhs, p.rhs, evidence=label, model=p.model,
                           witness=p.witness, parts=parts)
    if all(p.proved for p in parts):
        return Verdict(Status.PROVED, lhs, rhs, evidence=label or "all parts proved", parts=parts)
    bounds = next((p.bounds for p in parts if p.unknown), None)
    return Verdict(Status.UNKNOWN, lhs, rhs, evidence=label, bounds=bounds, parts=parts)


# -- decision -------------------------------------------------------------------


def _check_same_signature(V: VarietySpec, *terms: Term) -> None:
    for t in terms:
        try:
            check_term(t, V.sig)
        except ValueError as exc:
            raise VarietyError(f"signature mismatch with {V.name}: {exc}") from None


def normal_form(V: VarietySpec, t: Term) -> Term:
    """Canonical representative for catalog varieties; rewrite normal form for asserted rules."""
    _check_same_signature(V, t)
    if isinstance(V.decision, Catalog):
        return _catalog_nf(V.decision, V.sig, t)
    if isinstance(V.decision, AssertedRewrite):
        return rewrite_normal_form(V.decision.rules, t)
    raise VarietyError(f"{V.name} has no normal-form procedure")


def rewrite_normal_form(rules: Sequence[tuple[Term, Term]], t: Term) -> Term:
    """Innermost normalisation; raises after REWRITE_STEP_LIMIT steps."""
    steps = [0]

    def norm(s: Term) -> Term:
        if isinstance(s, App):
            s = App(s.symbol, [norm(a) for a in s.args])
        for lhs, rhs in rules:
            m = match_instance(lhs, s)
            if m is not None:
                steps[0] += 1
                if steps[0] > REWRITE_STEP_LIMIT:
                    raise VarietyError("rewrite step limit exceeded; rules may not terminate")
                return norm(substitute(rhs, m))
        return s

    return norm(t)


def one_step_proof(base: Sequence[Identity], u: Term, v: Term) -> str | None:
    """Describe a single base-identity instance turning u into v, if there is one.

    The rewrite position must lie on the path from the root to the unique
    place where u and v start to differ.
    """
    path: list[tuple[int, ...]] = [()]
    a, b = u, v
    pos: tuple[int, ...] = ()
    while isinstance(a, App) and isinstance(b, App) and a.symbol == b.symbol:
        diffs = [i for i, (x, y) in enumerate(zip(a.args, b.args)) if x != y]
        if len(diffs) != 1:
            break
        i = diffs[0]
        a, b, pos = a.args[i], b.args[i], pos + (i,)
        path.append(pos)
    for p in reversed(path):
        s, s2 = term_at(u, p), term_at(v, p)
        for ident in base:
            for l, r in ((ident.lhs, ident.rhs), (ident.rhs, ident.lhs)):
                m = match_instance(l, s)
                if m is None:
                    continue
                if match_instance(r, s2, m) is not None:
                    where = "root" if not p else "position " + ".".join(str(i + 1) for i in p)
                    return f"one step by {ident} at {where}"
    return None


def decide_identity(
    V: VarietySpec,
    u: Term,
    v: Term,
    model_bound: int = DEFAULT_MODEL_BOUND,
) -> Verdict:
    """Three-valued decision of ``V |= u = v``.

    ``model_bound`` caps the size of models tried by the fallback countermodel
    search (0 disables it).
    """
    _check_same_signature(V, u, v)
    if u == v:
        return Verdict(Status.PROVED, u, v, evidence="syntactically equal")
    dec = V.decision
    if isinstance(dec, Catalog):
        nu, nv = _catalog_nf(dec, V.sig, u), _catalog_nf(dec, V.sig, v)
        if nu == nv:
            return Verdict(Status.PROVED, u, v, evidence=f"{dec.label} normal form {pretty(nu)}")
        found = catalog_countermodel(dec, V.sig, u, v)
        note = f"{dec.label} normal forms differ: {pretty(nu)} vs {pretty(nv)}"
        if found is not None:
            A, w = found
            return Verdict(Status.REFUTED, u, v, evidence=note, model=A, witness=w)
        return _search_or_unknown(V, u, v, model_bound, note)
    if isinstance(dec, AssertedRewrite):
        nu = rewrite_normal_form(dec.rules, u)
        nv = rewrite_normal_form(dec.rules, v)
        if nu == nv:
            return Verdict(
                Status.PROVED, u, v,
                evidence=f"rewrite normal form {pretty(nu)} (sound if the asserted rules are convergent)",
            )
        return _search_or_unknown(V, u, v, model_bound, f"rewrite normal forms differ: {pretty(nu)} vs {pretty(nv)}")
    step = one_step_proof(V.base, u, v)
    if step is not None:
        return Verdict(Status.PROVED, u, v, evidence=step)
    return _search_or_unknown(V, u, v, model_bound, "no single-step proof")


def _search_or_unknown(V, u, v, model_bound, note):
    if model_bound > 0:
        found = _search(V.sig, V.base, Identity(u, v), model_bound)
        if found is not None:
            A, w = found
            return Verdict(Status.REFUTED, u, v, evidence=note, model=A, witness=w)
    return Verdict(Status.UNKNOWN, u, v, evidence=note, bounds={"model_bound": model_bound})


def countermodel_search(V: VarietySpec, ident: Identity, max_size: int = DEFAULT_MODEL_BOUND):
    """First model of base(V) of size at most ``max_size`` falsifying ``ident``, with witness."""
    if max_size < 1:
        raise VarietyError("max_size must be at least 1")
    _check_same_signature(V, ident.lhs, ident.rhs)
    return _search(V.sig, V.base, ident, max_size)


def is_term_idempotent(V: VarietySpec, t: Term, model_bound: int = DEFAULT_MODEL_BOUND) -> Verdict:
    """Conjunction over the basic operations of ``V |= op(t, ..., t) = t``."""
    parts = [
        decide_identity(V, App(symbol, [t] * arity), t, model_bound)
        for symbol, arity in V.sig.operations
    ]
    return conjunction(t, t, parts, label=f"term idempotent {pretty(t)}")


def equivalent(V: VarietySpec, u: Term, v: Term, model_bound: int = 0) -> bool:
    """Shorthand: Proved?"""
    return decide_identity(V, u, v, model_bound).proved


__all__ = [
    "AssertedRewrite",
    "Catalog",
    "DEFAULT_MODEL_BOUND",
    "DEFAULT_TERM_BOUND",
    "Generic",
    "Status",
    "VarietyError",
    "VarietySpec",
    "Verdict",
    "catalog_variety",
    "conjunction",
    "countermodel_search",
    "decide_identity",
    "is_term_idempotent",
    "normal_form",
    "one_step_proof",
    "rewrite_normal_form",
]
