"""Sufficient conditions for a Mal'tsev product to be a variety, and the chain terms behind them.

Terms ``f`` and ``g`` are read as ternary terms in x, y, z.  A binary term
h(x, y) is read as the ternary term h(x, z), which ignores its middle argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import FiniteAlgebra, evaluate
from .catalog import Catalog
from .replica import PairWitness
from .terms import App, Term, Var, enumerate_terms, ordered_variables, pretty, rename, substitute, variables_of
from .variety import (
    Status,
    Verdict,
    VarietySpec,
    conjunction,
    decide_identity,
    is_term_idempotent,
)

X, Y, Z = Var("x"), Var("y"), Var("z")

#: Catalog tags whose varieties are term idempotent (every nontrivial identity has term idempotent sides).
TERM_IDEMPOTENT_TAGS = frozenset(
    {"Trivial", "Semilattice", "LeftZero", "RightZero", "RectBand", "RS", "CS", "ConstAlg", "Ck", "Un"}
)


class ChainError(ValueError):
    pass


def as_ternary(t: Term, arity: int | None = None) -> Term:
    """Ternary reading of t; binary terms h(x, y) become h(x, z)."""
    names = variables_of(t)
    if not names <= {"x", "y", "z"}:
        raise ChainError(f"{pretty(t)} uses variables outside x, y, z")
    if arity is None:
        arity = 3 if "z" in names else 2
    if arity == 2:
        if "z" in names:
            raise ChainError(f"{pretty(t)} is not binary")
        return substitute(t, {"y": Z})
    if arity != 3:
        raise ChainError("arity must be 2 or 3")
    return t


def apply3(t: Term, a: Term, b: Term, c: Term) -> Term:
    """t(a, b, c) for a ternary term t in x, y, z."""
    return substitute(t, {"x": a, "y": b, "z": c})


def is_term_idempotent_variety(W: VarietySpec, model_bound: int = 0) -> bool | None:
    """True/False when known; None when undecided."""
    if isinstance(W.decision, Catalog):
        return W.decision.tag in TERM_IDEMPOTENT_TAGS
    v = is_term_idempotent(W, X, model_bound)
    if v.proved:
        return True  # idempotent varieties are term idempotent
    return None


@dataclass
class HypothesisReport:
    """The four conditions of the theorem for a candidate pair (f, g)."""

    inner: str
    outer: str
    f: Term
    g: Term
    arity: int
    a1: Verdict
    a2: Verdict
    b: Verdict
    c: Verdict
    outer_term_idempotent: bool | None
    independence: Verdict | None = None
    special_cases: list[str] = field(default_factory=list)

    @property
    def conditions(self) -> list[tuple[str, str, Verdict]]:
        return [
            ("a1", f"{self.inner} ⊨ f(x,y,y) = x", self.a1),
            ("a2", f"{self.inner} ⊨ g(x,x,y) = y", self.a2),
            ("b", f"{self.outer} ⊨ f(x,x,y) = g(x,x,y)", self.b),
            ("c", f"f(x,x,y) is a term idempotent of {self.outer}", self.c),
        ]

    @property
    def all_proved(self) -> bool:
        return all(v.proved for _, _, v in self.conditions)

    @property
    def any_refuted(self) -> bool:
        return any(v.refuted for _, _, v in self.conditions)

    @property
    def conclusion(self) -> str | None:
        """Which result applies, if any (cited, not re-proved)."""
        if self.outer_term_idempotent is False:
            return None
        caveat = "" if self.outer_term_idempotent else f", provided {self.outer} is term idempotent"
        if self.all_proved:
            return f"{self.inner}∘{self.outer} is a variety (conditions (a)-(c){caveat})"
        if self.independence is not None and self.independence.proved:
            return f"{self.inner}∘{self.outer} is a variety ({self.inner} and {self.outer} are independent{caveat})"
        return None

    def render(self) -> str:
        lines = [
            f"hypotheses for {self.inner}∘{self.outer} with f = {pretty(self.f)}, g = {pretty(self.g)}"
            f" ({'binary' if self.arity == 2 else 'ternary'} reading)"
        ]
        for key, text, v in self.conditions:
            lines.append(f"  ({key}) {text}: {v.summary()}")
        if self.independence is not None:
            lines.append(f"  independence ({self.inner} ⊨ f(x,y)=x, {self.outer} ⊨ f(x,y)=y): {self.independence.status.value}")
        ti = {True: "yes", False: "no", None: "not decided"}[self.outer_term_idempotent]
        lines.append(f"  {self.outer} term idempotent: {ti}")
        if self.special_cases:
            lines.append("  special cases: " + "; ".join(self.special_cases))
        lines.append(f"  conclusion: {self.conclusion or 'none'}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "inner": self.inner,
            "outer": self.outer,
            "f": str(self.f),
            "g": str(self.g),
            "arity": self.arity,
            "conditions": {key: v.to_dict() for key, _, v in self.conditions},
            "independence": self.independence.to_dict() if self.independence else None,
            "outer_term_idempotent": self.outer_term_idempotent,
            "special_cases": list(self.special_cases),
            "all_proved": self.all_proved,
            "conclusion": self.conclusion,
        }


def check_theorem_hypotheses(
    V: VarietySpec,
    W: VarietySpec,
    f: Term,
    g: Term,
    arity: int | None = None,
    model_bound: int = 4,
) -> HypothesisReport:
    """Evaluate conditions (a1), (a2), (b), (c) for f and g and label special cases.

    ``arity`` None means binary when neither term mentions z.
    """
    if arity is None:
        arity = 3 if ("z" in variables_of(f) | variables_of(g)) else 2
    f3, g3 = as_ternary(f, arity), as_ternary(g, arity)
    fxyy = apply3(f3, X, Y, Y)
    gxxy = apply3(g3, X, X, Y)
    fxxy = apply3(f3, X, X, Y)
    a1 = decide_identity(V, fxyy, X, model_bound)
    a2 = decide_identity(V, gxxy, Y, model_bound)
    b = decide_identity(W, fxxy, gxxy, model_bound)
    c = is_term_idempotent(W, fxxy, model_bound)
    cases = []
    independence = None
    if arity == 2:
        cases.append("binary terms: f, g ignore the middle argument")
        independence = conjunction(
            f, Y,
            [decide_identity(V, f, X, model_bound), decide_identity(W, f, Y, model_bound)],
            label="independence",
        )
        if independence.proved:
            cases.append(f"independence: {V.name} ⊨ f(x,y) = x and {W.name} ⊨ f(x,y) = y")
    if f3 == g3 and a1.proved and a2.proved:
        cases.append(f"Mal'tsev: f = g is a Mal'tsev term of {V.name}, so (b) is trivial")
    report = HypothesisReport(
        V.name, W.name, f, g, arity, a1, a2, b, c,
        is_term_idempotent_variety(W), independence, cases,
    )
    return report


@dataclass
class FgSearchResult:
    inner: str
    outer: str
    max_size: int
    pairs: list[tuple[Term, Term, HypothesisReport]]
    candidates_examined: int

    def render(self) -> str:
        lines = [
            f"search for (f, g) with {self.inner}∘{self.outer}, term size ≤ {self.max_size}: "
            f"{len(self.pairs)} pairs with every condition proved"
        ]
        if not self.pairs:
            lines.append("  none within the bound (this does not show that no pair exists)")
        for f, g, rep in self.pairs:
            kind = "binary" if rep.arity == 2 else "ternary"
            lines.append(f"  f = {pretty(f)}, g = {pretty(g)} ({kind})")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "inner": self.inner,
            "outer": self.outer,
            "max_size": self.max_size,
            "bounded_empty": not self.pairs,
            "pairs": [{"f": str(f), "g": str(g), "arity": r.arity} for f, g, r in self.pairs],
        }


def search_fg(V: VarietySpec, W: VarietySpec, max_size: int) -> FgSearchResult:
    """All pairs (f, g) up to ``max_size`` each with every condition Proved.

    Binary candidates over x, y come first, then genuinely ternary ones over
    x, y, z; inside each phase pairs are ordered by size(f) + size(g), then by
    enumeration order.  Only Proved counts, so refutation is skipped.
    """
    out = []
    examined = 0
    for arity, names in ((2, ("x", "y")), (3, ("x", "y", "z"))):
        terms = enumerate_terms(V.sig, names, max_size)
        rank = {t: i for i, t in enumerate(terms)}
        fs = [t for t in terms if decide_identity(V, apply3(as_ternary(t, arity), X, Y, Y), X, 0).proved]
        gs = [t for t in terms if decide_identity(V, apply3(as_ternary(t, arity), X, X, Y), Y, 0).proved]
        pairs = [(f, g) for f in fs for g in gs]
        if arity == 3:
            pairs = [(f, g) for f, g in pairs if "z" in variables_of(f) | variables_of(g)]
        pairs.sort(key=lambda p: (p[0].size + p[1].size, rank[p[0]], rank[p[1]]))
        idem_cache: dict[Term, bool] = {}
        for f, g in pairs:
            examined += 1
            f3, g3 = as_ternary(f, arity), as_ternary(g, arity)
            fxxy = apply3(f3, X, X, Y)
            if not decide_identity(W, fxxy, apply3(g3, X, X, Y), 0).proved:
                continue
            if fxxy not in idem_cache:
                idem_cache[fxxy] = is_term_idempotent(W, fxxy, 0).proved
            if not idem_cache[fxxy]:
                continue
            rep = check_theorem_hypotheses(V, W, f, g, arity, model_bound=0)
            if rep.all_proved:
                out.append((f, g, rep))
    return FgSearchResult(V.name, W.name, max_size, out, examined)


# -- chain terms -------------------------------------------------------------------------


@dataclass
class ChainData:
    """Terms t_{i,j} built from f, g and identities p_i = q_i (i = 1..n-1).

    ``pairs`` hold the renamed identities: the variables of p_i, q_i are
    ``z{i}_1, z{i}_2, ...`` so distinct pairs share no variable.
    """

    f: Term
    g: Term
    pairs: list[tuple[Term, Term]]
    table: dict[tuple[int, int], Term]
    t: list[Term]
    renaming: list[dict[str, str]]

    @property
    def n(self) -> int:
        return len(self.t)

    def render(self) -> str:
        lines = [f"chain for f = {pretty(self.f)}, g = {pretty(self.g)}, n = {self.n}"]
        for i, (p, q) in enumerate(self.pairs, 1):
            lines.append(f"  p_{i} = {pretty(p)},  q_{i} = {pretty(q)}")
        for i, t in enumerate(self.t, 1):
            lines.append(f"  t_{i} = {pretty(t)}")
        return "\n".join(lines)


def _rename_pair(i: int, p: Term, q: Term) -> tuple[Term, Term, dict[str, str]]:
    names = ordered_variables(p, q)
    mapping = {v: f"z{i}_{k}" for k, v in enumerate(names, 1)}
    return rename(p, mapping), rename(q, mapping), mapping


def build_chain_terms(
    f: Term,
    g: Term,
    chain: Sequence[tuple[Term, Term]],
    arity: int | None = None,
    first: Term | None = None,
) -> ChainData:
    """Build t_{i,j} for i = 1..n, j = 0..n-1 where n = len(chain) + 1.

    t_{i,0} = p_1; t_{i,j} = f(q_j, p_j, t_{i,j-1}) for 0 < j < i; and
    t_{i,j} = g(q_j, q_j, t_{i,j-1}) for j >= i.  With an empty chain the
    single term is ``first`` (default the variable z1_1).
    """
    if arity is None:
        arity = 3 if ("z" in variables_of(f) | variables_of(g)) else 2
    f3, g3 = as_ternary(f, arity), as_ternary(g, arity)
    pairs, renaming = [], []
    for i, pair in enumerate(chain, 1):
        if len(pair) != 2:
            raise ChainError(f"chain entry {i} is not a pair of terms")
        p, q, mapping = _rename_pair(i, *pair)
        pairs.append((p, q))
        renaming.append(mapping)
    n = len(pairs) + 1
    if not pairs:
        t1 = first if first is not None else Var("z1_1")
        return ChainData(f3, g3, [], {(1, 0): t1}, [t1], [])
    table: dict[tuple[int, int], Term] = {}
    for i in range(1, n + 1):
        table[(i, 0)] = pairs[0][0]
        for j in range(1, n):
            p_j, q_j = pairs[j - 1]
            prev = table[(i, j - 1)]
            table[(i, j)] = apply3(f3, q_j, p_j, prev) if j < i else apply3(g3, q_j, q_j, prev)
    return ChainData(f3, g3, pairs, table, [table[(i, n - 1)] for i in range(1, n + 1)], renaming)


@dataclass
class ChainReport:
    part_c: list[Verdict]
    part_d: Verdict | None
    part_e: list[tuple[int, int, int]] | None = None
    chain_identities: list[Verdict] = field(default_factory=list)

    @property
    def c_ok(self) -> bool:
        return all(v.proved for v in self.part_c)

    @property
    def d_ok(self) -> bool:
        return self.part_d is None or self.part_d.proved

    @property
    def e_ok(self) -> bool | None:
        if self.part_e is None:
            return None
        return all(a == b for _, a, b in self.part_e)

    @property
    def ok(self) -> bool:
        return self.c_ok and self.d_ok and self.e_ok is not False

    def render(self) -> str:
        lines = []
        for i, v in enumerate(self.chain_identities, 1):
            lines.append(f"  chain identity p_{i} = q_{i}: {v.status.value}")
        if self.part_c:
            for i, v in enumerate(self.part_c, 1):
                lines.append(f"  part C, t_{i} = t_{i + 1}: {v.status.value}")
        else:
            lines.append("  part C: vacuous (n = 1)")
        if self.part_d is None:
            lines.append("  part D: vacuous (n = 1)")
        else:
            lines.append(f"  part D, t_1 term idempotent: {self.part_d.status.value}")
        if self.part_e is not None:
            for i, want, got in self.part_e:
                lines.append(f"  part E, a_{i} = t_{i}(c): {'ok' if want == got else 'FAILS'} ({want} vs {got})")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "chain_identities": [v.status.value for v in self.chain_identities],
            "part_c": [v.status.value for v in self.part_c],
            "part_d": self.part_d.status.value if self.part_d else "vacuous",
            "part_e": None if self.part_e is None else [
                {"i": i, "expected": a, "got": b} for i, a, b in self.part_e
            ],
            "ok": self.ok,
        }


def verify_chain(
    W: VarietySpec,
    V: VarietySpec | None,
    data: ChainData,
    A: FiniteAlgebra | None = None,
    elements: Sequence[int] | None = None,
    assignment: dict[str, int] | None = None,
    model_bound: int = 4,
) -> ChainReport:
    """Check W ⊨ t_i = t_{i+1}, that t_1 is a term idempotent of W, and a_i = t_i(c) in A.

    ``V`` is accepted for symmetry with the theorem; the three checks only
    involve W and the optional algebra.  ``assignment`` is the single
    concatenated tuple c covering the variables of every chain pair.
    """
    idents = [decide_identity(W, p, q, model_bound) for p, q in data.pairs]
    part_c = [decide_identity(W, data.t[i], data.t[i + 1], model_bound) for i in range(data.n - 1)]
    part_d = is_term_idempotent(W, data.t[0], model_bound) if data.n > 1 else None
    part_e = None
    if A is not None:
        if elements is None or assignment is None:
            raise ChainError("element-level check needs the elements a_i and the assignment c")
        if len(elements) != data.n:
            raise ChainError(f"expected {data.n} elements, got {len(elements)}")
        part_e = [(i + 1, int(a), evaluate(A, t, assignment)) for i, (a, t) in enumerate(zip(elements, data.t))]
    return ChainReport(part_c, part_d, part_e, idents)


def chain_from_witnesses(
    f: Term, g: Term, witnesses: Sequence[PairWitness], arity: int | None = None
) -> tuple[ChainData, list[int], dict[str, int]]:
    """Chain data, elements a_1..a_n and the concatenated tuple c from pair witnesses.

    Witness i must take p_i to a_i and q_i to a_{i+1}.
    """
    if not witnesses:
        raise ChainError("need at least one witness")
    for k in range(len(witnesses) - 1):
        if witnesses[k].b != witnesses[k + 1].a:
            raise ChainError(f"witness {k + 1} ends at {witnesses[k].b}, witness {k + 2} starts at {witnesses[k + 1].a}")
    data = build_chain_terms(f, g, [(w.lhs, w.rhs) for w in witnesses], arity)
    assignment: dict[str, int] = {}
    for w, mapping in zip(witnesses, data.renaming):
        for old, new in mapping.items():
            assignment[new] = w.assignment[old]
    elements = [witnesses[0].a] + [w.b for w in witnesses]
    return data, elements, assignment


def compose_witnesses(f: Term, g: Term, first: PairWitness, second: PairWitness, arity: int | None = None) -> PairWitness:
    """From a ~ b and b ~ c build a ~ c with p = f(p1, q1, p2) and q = g(q1, q1, q2).

    The result witnesses the pair (a, c) in any algebra satisfying
    f(p1, q1, q1) = p1 and g(p2, p2, q2) = q2 at the given elements.
    """
    if first.b != second.a:
        raise ChainError("witnesses do not share their middle element")
    if arity is None:
        arity = 3 if ("z" in variables_of(f) | variables_of(g)) else 2
    f3, g3 = as_ternary(f, arity), as_ternary(g, arity)
    p1, q1, m1 = _rename_pair(1, first.lhs, first.rhs)
    p2, q2, m2 = _rename_pair(2, second.lhs, second.rhs)
    asg = {new: first.assignment[old] for old, new in m1.items()}
    asg.update({new: second.assignment[old] for old, new in m2.items()})
    return PairWitness(first.a, second.b, apply3(f3, p1, q1, p2), apply3(g3, q1, q1, q2), asg)


def maltsev_chain_example() -> tuple[Term, Term, list[tuple[Term, Term]]]:
    """f = g = x·y⁻¹·z in the group signature with the pair x·(y·y⁻¹), x."""
    mul = lambda a, b: App("mul", (a, b))  # noqa: E731
    inv = lambda a: App("inv", (a,))  # noqa: E731
    m = mul(mul(X, inv(Y)), Z)
    return m, m, [(mul(X, mul(Y, inv(Y))), X)]


__all__ = [
    "ChainData",
    "ChainError",
    "ChainReport",
    "FgSearchResult",
    "HypothesisReport",
    "Status",
    "as_ternary",
    "build_chain_terms",
    "chain_from_witnesses",
    "check_theorem_hypotheses",
    "compose_witnesses",
    "is_term_idempotent_variety",
    "maltsev_chain_example",
    "search_fg",
    "verify_chain",
]
