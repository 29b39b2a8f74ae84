"""Polar terms, zero terms and the polarization classification of a variety."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .terms import App, Identity, Term, Var, enumerate_terms, pretty, rename, variables_of
from .variety import (
    DEFAULT_MODEL_BOUND,
    VarietyError,
    VarietySpec,
    Verdict,
    conjunction,
    decide_identity,
    is_term_idempotent,
)

DEFAULT_POLAR_SIZE = 3


class Polarization(str, Enum):
    NOT_POLARIZED = "not polarized"
    POLARIZED = "polarized"
    PURELY_POLARIZED = "purely polarized"
    UNKNOWN = "unknown"


def _only_variable(p: Term) -> str:
    names = variables_of(p)
    if len(names) != 1:
        raise VarietyError(f"{pretty(p)} is not a unary term")
    return next(iter(names))


def _fresh(avoid: set[str], stem: str = "w") -> str:
    k = 0
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def constancy(W: VarietySpec, p: Term, model_bound: int = DEFAULT_MODEL_BOUND) -> Verdict:
    """W ⊨ p(x) = p(y)."""
    x = _only_variable(p)
    y = _fresh({x}, "y")
    return decide_identity(W, p, rename(p, {x: y}), model_bound)


def find_polar_terms(W: VarietySpec, max_size: int, model_bound: int = DEFAULT_MODEL_BOUND) -> list[Term]:
    """Unary terms up to ``max_size`` that are constant term idempotents (both Proved)."""
    out = []
    for t in enumerate_terms(W.sig, ("x",), max_size):
        if constancy(W, t, model_bound).proved and is_term_idempotent(W, t, model_bound).proved:
            out.append(t)
    return out


def is_zero_term(W: VarietySpec, p: Term, model_bound: int = DEFAULT_MODEL_BOUND) -> Verdict:
    """Constancy of p plus ω(y1, …, p(x), …, yn) = p(x) for every ω and position."""
    x = _only_variable(p)
    parts = [constancy(W, p, model_bound)]
    for symbol, arity in W.sig.operations:
        others = [Var(f"y{j}" if f"y{j}" != x else f"y{j}_") for j in range(1, arity + 1)]
        for i in range(arity):
            args = list(others)
            args[i] = p
            parts.append(decide_identity(W, App(symbol, args), p, model_bound))
    return conjunction(p, p, parts, label=f"zero term {pretty(p)}")


@dataclass
class PolarizationReport:
    variety: str
    classification: Polarization
    max_size: int
    polar_terms: list[Term]
    zero_terms: list[tuple[Term, Verdict]] = field(default_factory=list)
    decompositions: list[tuple[Identity, Verdict, Verdict]] = field(default_factory=list)
    undecided: list[Term] = field(default_factory=list)

    def render(self) -> str:
        lines = [f"{self.variety}: {self.classification.value} (unary terms up to size {self.max_size})"]
        if self.polar_terms:
            lines.append("  polar terms: " + ", ".join(pretty(t) for t in self.polar_terms))
        for p, v in self.zero_terms:
            lines.append(f"  zero term {pretty(p)}: {v.status.value}")
        for ident, lv, rv in self.decompositions:
            lines.append(
                f"  base identity {ident.pretty()}: lhs = p(w) {lv.status.value}, rhs = p(w) {rv.status.value}"
            )
        if self.undecided:
            lines.append("  undecided candidates: " + ", ".join(pretty(t) for t in self.undecided))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "variety": self.variety,
            "classification": self.classification.value,
            "max_size": self.max_size,
            "polar_terms": [str(t) for t in self.polar_terms],
            "zero_terms": [{"term": str(p), "status": v.status.value} for p, v in self.zero_terms],
            "decompositions": [
                {"identity": str(i), "lhs": lv.status.value, "rhs": rv.status.value}
                for i, lv, rv in self.decompositions
            ],
            "undecided": [str(t) for t in self.undecided],
        }


def classify_polarization(
    W: VarietySpec, max_size: int = DEFAULT_POLAR_SIZE, model_bound: int = DEFAULT_MODEL_BOUND
) -> PolarizationReport:
    """Classify W from a bounded search for polar terms.

    Purely polarized needs a zero term among the polar terms and every
    nontrivial base identity u = v with W ⊨ u = p(w) and W ⊨ v = p(w) for a
    polar p and a fresh w.  Not polarized needs every candidate refuted.
    """
    polar, undecided = [], []
    for t in enumerate_terms(W.sig, ("x",), max_size):
        const = constancy(W, t, model_bound)
        idem = is_term_idempotent(W, t, model_bound) if not const.refuted else None
        if const.proved and idem.proved:
            polar.append(t)
        elif not (const.refuted or (idem is not None and idem.refuted)):
            undecided.append(t)
    if not polar:
        cls = Polarization.UNKNOWN if undecided else Polarization.NOT_POLARIZED
        return PolarizationReport(W.name, cls, max_size, [], undecided=undecided)

    zero = [(p, is_zero_term(W, p, model_bound)) for p in polar]
    p = polar[0]
    decomps = []
    for ident in W.base:
        if ident.is_trivial:
            continue
        w = _fresh(variables_of(ident.lhs) | variables_of(ident.rhs))
        pw = rename(p, {"x": w})
        decomps.append(
            (ident, decide_identity(W, ident.lhs, pw, model_bound), decide_identity(W, ident.rhs, pw, model_bound))
        )
    purely = any(v.proved for _, v in zero) and all(lv.proved and rv.proved for _, lv, rv in decomps)
    cls = Polarization.PURELY_POLARIZED if purely else Polarization.POLARIZED
    return PolarizationReport(W.name, cls, max_size, polar, zero, decomps, undecided)
