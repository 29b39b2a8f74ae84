"""Catalog varieties: bases, exact normal forms and small refuting models.

Every catalog variety has a normal form such that two terms are equal in
the variety exactly when their normal forms coincide.  Refutations come from
explicit small models built for the particular pair of normal forms, so they
never need a blind search.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, direct_product, evaluate, evaluate_array, odometer
from .terms import (
    GROUP,
    GROUPOID,
    MONOUNARY,
    App,
    Identity,
    Signature,
    Term,
    Var,
    left_comb,
    ordered_variables,
    parse_identity,
)

#: Variable used in normal forms that do not depend on the term's variables.
MARKER = "_"

TAGS = ("Trivial", "Semilattice", "LeftZero", "RightZero", "RectBand", "RS", "CS", "ConstAlg", "Ck", "Un", "Grp")

_ALIASES = {
    "T": "Trivial", "TRIVIAL": "Trivial",
    "S": "Semilattice", "SL": "Semilattice", "SEMILATTICE": "Semilattice",
    "LZ": "LeftZero", "LEFTZERO": "LeftZero",
    "RZ": "RightZero", "RIGHTZERO": "RightZero",
    "RB": "RectBand", "RECTBAND": "RectBand",
    "RS": "RS",
    "CS": "CS",
    "CT": "ConstAlg", "CONSTALG": "ConstAlg",
    "GRP": "Grp", "G": "Grp",
}


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class Catalog:
    """Decision procedure tag; ``param`` is k for Ck and n for Un."""

    tag: str
    param: int | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise CatalogError(f"unknown catalog tag {self.tag!r}")
        if self.tag == "Ck" and (self.param is None or self.param < 2):
            raise CatalogError("Ck needs k >= 2")
        if self.tag == "Un" and (self.param is None or self.param < 0):
            raise CatalogError("Un needs n >= 0")

    @property
    def label(self) -> str:
        short = {"Semilattice": "S", "LeftZero": "LZ", "RightZero": "RZ", "RectBand": "RB",
                 "ConstAlg": "CT", "Grp": "GRP", "Trivial": "TRIVIAL"}
        if self.tag == "Ck":
            return f"C{self.param}"
        if self.tag == "Un":
            return f"U{self.param}"
        return short.get(self.tag, self.tag)


def parse_tag(text: str) -> Catalog:
    key = text.strip().upper()
    m = re.fullmatch(r"C(\d+)", key)
    if m:
        return Catalog("Ck", int(m.group(1)))
    m = re.fullmatch(r"U(\d+)", key)
    if m:
        return Catalog("Un", int(m.group(1)))
    if key in _ALIASES:
        return Catalog(_ALIASES[key])
    for tag in TAGS:
        if tag.upper() == key:
            return Catalog(tag)
    raise CatalogError(f"unknown catalog variety {text!r}")


def default_signature(cat: Catalog) -> Signature:
    if cat.tag == "Un":
        return MONOUNARY
    if cat.tag == "Grp":
        return GROUP
    return GROUPOID


def catalog_base(cat: Catalog, sig: Signature) -> list[Identity]:
    _check_signature(cat, sig)
    p = lambda s: parse_identity(s, sig)  # noqa: E731
    tag = cat.tag
    if tag == "Trivial":
        return [p("x = y")]
    if tag == "Semilattice":
        return [p("mul(x,x) = x"), p("mul(x,y) = mul(y,x)"), p("mul(mul(x,y),z) = mul(x,mul(y,z))")]
    if tag == "LeftZero":
        return [p("mul(x,y) = x")]
    if tag == "RightZero":
        return [p("mul(x,y) = y")]
    if tag == "RectBand":
        return [p("mul(x,x) = x"), p("mul(mul(x,y),z) = mul(x,z)"), p("mul(x,mul(y,z)) = mul(x,z)")]
    if tag == "RS":
        return [p("mul(mul(x,y),z) = mul(x,z)"), p("mul(x,mul(y,z)) = mul(x,z)")]
    if tag == "CS":
        return [p("mul(x,y) = mul(z,t)")]
    if tag == "ConstAlg":
        out = []
        ops = sig.operations
        for i, (s1, a1) in enumerate(ops):
            for s2, a2 in ops[i:]:
                xs = [Var(f"x{j}") for j in range(1, a1 + 1)]
                ys = [Var(f"y{j}") for j in range(1, a2 + 1)]
                out.append(Identity(App(s1, xs), App(s2, ys)))
        return out
    if tag == "Ck":
        k = cat.param
        xs = [Var(f"x{j}") for j in range(1, k + 1)]
        # with associativity, x1⋯xk = y⋯y is equivalent to x1⋯xk = y1⋯yk and has fewer variables
        return [p("mul(mul(x,y),z) = mul(x,mul(y,z))"), Identity(left_comb("mul", xs), left_comb("mul", [Var("y")] * k))]
    if tag == "Un":
        fn = _power("f", cat.param, Var("x"))
        return [Identity(App("f", (fn,)), fn)]
    if tag == "Grp":
        return [
            p("mul(mul(x,y),z) = mul(x,mul(y,z))"),
            p("mul(mul(x,inv(x)),y) = y"),
            p("mul(y,mul(x,inv(x))) = y"),
        ]
    raise CatalogError(tag)


def _check_signature(cat: Catalog, sig: Signature) -> None:
    if cat.tag == "ConstAlg":
        return
    if cat.tag == "Trivial":
        return
    if sig != default_signature(cat):
        raise CatalogError(f"catalog variety {cat.label} is defined for the {default_signature(cat).name} type only")


def _power(symbol: str, m: int, t: Term) -> Term:
    for _ in range(m):
        t = App(symbol, (t,))
    return t


# -- normal forms -------------------------------------------------------------


def ordered_leaf_names(t: Term) -> list[str]:
    """Variable occurrences left to right (with repetitions)."""
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.append(s.name)
        else:
            stack.extend(reversed(s.args))
    return out


def _free_group_word(t: Term) -> list[tuple[str, int]]:
    if isinstance(t, Var):
        return [(t.name, 1)]
    if t.symbol == "mul":
        return _reduce(_free_group_word(t.args[0]) + _free_group_word(t.args[1]))
    if t.symbol == "inv":
        return [(x, -e) for x, e in reversed(_free_group_word(t.args[0]))]
    raise CatalogError(f"symbol {t.symbol!r} is not in the group type")


def _reduce(word: list[tuple[str, int]]) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return out


def free_group_word(t: Term) -> list[tuple[str, int]]:
    """Freely reduced word of a (mul, inv) term as (variable, ±1) letters."""
    return _reduce(_free_group_word(t))


def _word_term(word: Sequence[tuple[str, int]]) -> Term:
    if not word:
        m = Var(MARKER)
        return App("mul", (m, App("inv", (m,))))
    letters = [Var(x) if e == 1 else App("inv", (Var(x),)) for x, e in word]
    return left_comb("mul", letters)


def _unary_depth(t: Term) -> tuple[int, Var]:
    m = 0
    while isinstance(t, App):
        m += 1
        t = t.args[0]
    return m, t


def normal_form(cat: Catalog, sig: Signature, t: Term) -> Term:
    tag = cat.tag
    if tag == "Trivial":
        return Var(MARKER)
    if tag == "Semilattice":
        names = sorted(set(ordered_leaf_names(t)))
        return left_comb("mul", [Var(v) for v in names])
    if tag == "LeftZero":
        return Var(ordered_leaf_names(t)[0])
    if tag == "RightZero":
        return Var(ordered_leaf_names(t)[-1])
    if tag in ("RectBand", "RS"):
        if isinstance(t, Var):
            return t
        leaves = ordered_leaf_names(t)
        first, last = leaves[0], leaves[-1]
        if tag == "RectBand" and first == last:
            return Var(first)
        return App("mul", (Var(first), Var(last)))
    if tag == "CS":
        if isinstance(t, Var):
            return t
        return App("mul", (Var(MARKER), Var(MARKER)))
    if tag == "ConstAlg":
        if isinstance(t, Var):
            return t
        s, a = sig.operations[0]
        return App(s, [Var(MARKER)] * a)
    if tag == "Ck":
        word = ordered_leaf_names(t)
        if len(word) < cat.param:
            return left_comb("mul", [Var(v) for v in word])
        return left_comb("mul", [Var(MARKER)] * cat.param)
    if tag == "Un":
        m, x = _unary_depth(t)
        return _power("f", min(m, cat.param), x)
    if tag == "Grp":
        return _word_term(free_group_word(t))
    raise CatalogError(tag)


# -- small models -------------------------------------------------------------


def _groupoid(table: Sequence[Sequence[int]], name: str, names=None) -> FiniteAlgebra:
    n = len(table)
    return FiniteAlgebra(GROUPOID, n, {"mul": [v for row in table for v in row]}, names=names, name=name)


def left_zero_band(n: int = 2) -> FiniteAlgebra:
    return _groupoid([[i] * n for i in range(n)], f"LZ{n}")


def right_zero_band(n: int = 2) -> FiniteAlgebra:
    return _groupoid([list(range(n)) for _ in range(n)], f"RZ{n}")


def semilattice2() -> FiniteAlgebra:
    return _groupoid([[0, 0], [0, 1]], "SL2")


def zero_semigroup(n: int = 2) -> FiniteAlgebra:
    return _groupoid([[0] * n for _ in range(n)], f"CS{n}")


def constant_algebra(sig: Signature, n: int = 2) -> FiniteAlgebra:
    return FiniteAlgebra(sig, n, {s: [0] * n**a for s, a in sig.operations}, name=f"C{n}")


def chain_unary(n: int, copies: int = 1) -> FiniteAlgebra:
    """``copies`` disjoint chains 0 -> 1 -> ... -> n with f(n) = n; a model of Un."""
    f = []
    for c in range(copies):
        off = c * (n + 1)
        f.extend(off + min(i + 1, n) for i in range(n + 1))
    return FiniteAlgebra(MONOUNARY, len(f), {"f": f}, name=f"Ch{n}x{copies}")


def nilpotent_free(k: int, gens: int = 2) -> tuple[FiniteAlgebra, list[int]]:
    """Free Ck-semigroup on ``gens`` generators: words of length < k plus a zero.

    Returns the algebra and the element indices of the generators.
    """
    words: list[tuple[int, ...]] = [()]  # index 0: the zero
    frontier = [()]
    for _ in range(1, k):
        frontier = [w + (g,) for w in frontier for g in range(gens)]
        words.extend(frontier)
    index = {w: i for i, w in enumerate(words)}
    table = []
    for u in words:
        row = []
        for v in words:
            w = u + v
            row.append(0 if (not u or not v or len(w) >= k) else index[w])
        table.append(row)
    return _groupoid(table, f"F{gens}C{k}"), [index[(g,)] for g in range(gens)]


def group_from_permutations(gens: Sequence[Sequence[int]], name: str) -> FiniteAlgebra:
    """The permutation group generated by ``gens``; product is left-to-right composition."""
    degree = len(gens[0])
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident}
    i = 0
    gens = [tuple(g) for g in gens]
    while i < len(elems):
        for g in gens:
            h = tuple(g[p] for p in elems[i])
            if h not in seen:
                seen.add(h)
                elems.append(h)
        i += 1
    elems.sort()
    pos = {e: j for j, e in enumerate(elems)}
    n = len(elems)
    mul = [pos[tuple(b[a[p]] for p in range(degree))] for a in elems for b in elems]
    inv = []
    for a in elems:
        r = [0] * degree
        for p, q in enumerate(a):
            r[q] = p
        inv.append(pos[tuple(r)])
    return FiniteAlgebra(GROUP, n, {"mul": mul, "inv": inv}, name=name)


def cyclic_group(n: int) -> FiniteAlgebra:
    return FiniteAlgebra.from_functions(
        GROUP, n, {"mul": lambda a, b: (a + b) % n, "inv": lambda a: (-a) % n}, name=f"Z{n}"
    )


def _dihedral(n: int) -> FiniteAlgebra:
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return group_from_permutations([rot, ref], f"D{n}")


def _quaternion() -> FiniteAlgebra:
    # Regular representation of Q8 on {±1, ±i, ±j, ±k}.
    units = ["1", "i", "j", "k"]
    mult = {
        ("1", u): (1, u) for u in units
    }
    mult.update({(u, "1"): (1, u) for u in units})
    mult.update({
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    })
    elems = [(s, u) for s in (1, -1) for u in units]
    pos = {e: i for i, e in enumerate(elems)}

    def mul(a, b):
        (s1, u1), (s2, u2) = elems[a], elems[b]
        s, u = mult[(u1, u2)]
        return pos[(s1 * s2 * s, u)]

    def inv(a):
        return next(b for b in range(8) if mul(a, b) == 0)

    return FiniteAlgebra.from_functions(GROUP, 8, {"mul": mul, "inv": inv}, name="Q8")


def _sym(n: int) -> FiniteAlgebra:
    gens = [[1, 0] + list(range(2, n)), list(range(1, n)) + [0]]
    return group_from_permutations(gens, f"S{n}")


def _alt4() -> FiniteAlgebra:
    return group_from_permutations([[1, 2, 0, 3], [0, 2, 3, 1]], "A4")


_GROUP_LIBRARY: list[FiniteAlgebra] | None = None


def group_library() -> list[FiniteAlgebra]:
    """Small groups used to refute group identities, smallest first."""
    global _GROUP_LIBRARY
    if _GROUP_LIBRARY is None:
        libs = [cyclic_group(n) for n in range(2, 13)]
        libs.append(direct_product(cyclic_group(2), cyclic_group(2), name="V4"))
        libs += [_sym(3), _dihedral(4), _quaternion(), _dihedral(5), _alt4(), _dihedral(6), _sym(4)]
        libs.sort(key=lambda A: A.size)
        _GROUP_LIBRARY = libs
    return _GROUP_LIBRARY


# -- refutation -----------------------------------------------------------------

EXHAUSTIVE_LIMIT = 200_000


def find_witness(A: FiniteAlgebra, ident: Identity, seed: int = 0) -> dict[str, int] | None:
    """A falsifying assignment: exhaustive (odometer order) when small, else sampled."""
    names = ordered_variables(ident.lhs, ident.rhs)
    total = A.size ** len(names)
    if total <= EXHAUSTIVE_LIMIT:
        grid = odometer(A.size, len(names))
    else:
        rng = np.random.default_rng(seed)
        grid = rng.integers(0, A.size, size=(len(names), EXHAUSTIVE_LIMIT))
    env = {v: grid[i] for i, v in enumerate(names)}
    left = np.broadcast_to(evaluate_array(A, ident.lhs, env), grid.shape[1:])
    right = np.broadcast_to(evaluate_array(A, ident.rhs, env), grid.shape[1:])
    bad = np.flatnonzero(left != right)
    if bad.size == 0:
        return None
    k = int(bad[0])
    return {v: int(grid[i, k]) for i, v in enumerate(names)}


def _free_group_countermodel(u: Term, v: Term, cap: int = 720):
    """Permutation model separating two different reduced words.

    The reduced word w of u·v⁻¹ is traced along the points 0..|w| by partial
    permutations, one per variable, which extend to permutations; the point 0
    is moved to |w|, so w is not the identity in the generated group.
    """
    w = _reduce(free_group_word(u) + [(x, -e) for x, e in reversed(free_group_word(v))])
    m = len(w)
    names = sorted({x for x, _ in w} | set(ordered_variables(u, v)))
    partial: dict[str, dict[int, int]] = {x: {} for x in names}
    for j, (x, e) in enumerate(w):
        a, b = (j, j + 1) if e == 1 else (j + 1, j)
        if partial[x].get(a, b) != b:
            return None
        if any(src != a and dst == b for src, dst in partial[x].items()):
            return None
        partial[x][a] = b
    perms = {}
    for x in names:
        mp = partial[x]
        used = set(mp.values())
        free_targets = [p for p in range(m + 1) if p not in used]
        full = []
        for p in range(m + 1):
            if p in mp:
                full.append(mp[p])
            else:
                full.append(free_targets.pop(0))
        perms[x] = full
    gens = list(perms.values())
    if not gens:
        return None
    G = _bounded_group(gens, cap)
    if G is None:
        return None
    A, lookup = G
    witness = {x: lookup[tuple(perms[x])] for x in names}
    if evaluate(A, u, witness) == evaluate(A, v, witness):
        return None
    return A, witness


def _bounded_group(gens, cap):
    degree = len(gens[0])
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident}
    i = 0
    while i < len(elems):
        for g in gens:
            h = tuple(g[p] for p in elems[i])
            if h not in seen:
                if len(elems) >= cap:
                    return None
                seen.add(h)
                elems.append(h)
        i += 1
    A = group_from_permutations(gens, f"Perm{len(elems)}")
    pos = {e: j for j, e in enumerate(sorted(elems))}
    return A, pos


def catalog_countermodel(cat: Catalog, sig: Signature, u: Term, v: Term):
    """A model of the catalog variety with an assignment separating u and v, or None.

    Only call when the normal forms of u and v differ.
    """
    ident = Identity(u, v)
    tag = cat.tag
    if tag == "Ck":
        return _ck_countermodel(cat.param, u, v)
    if tag == "Un":
        m1, x1 = _unary_depth(u)
        m2, x2 = _unary_depth(v)
        n = cat.param
        if x1 == x2:
            A = chain_unary(n, 1)
            witness = {x1.name: 0}
        else:
            A = chain_unary(n, 2)
            witness = {x1.name: 0, x2.name: n + 1}
        return A, witness
    if tag == "Grp":
        for A in group_library():
            w = find_witness(A, ident)
            if w is not None:
                return A, w
        return _free_group_countermodel(u, v)
    candidates = {
        "Semilattice": [semilattice2()],
        "LeftZero": [left_zero_band()],
        "RightZero": [right_zero_band()],
        "RectBand": [left_zero_band(), right_zero_band()],
        "RS": [left_zero_band(), right_zero_band(), zero_semigroup()],
        "CS": [zero_semigroup()],
        "ConstAlg": [constant_algebra(sig)],
        "Trivial": [],
    }[tag]
    for A in candidates:
        w = find_witness(A, ident)
        if w is not None:
            return A, w
    return None


def _ck_countermodel(k: int, u: Term, v: Term):
    w1, w2 = ordered_leaf_names(u), ordered_leaf_names(v)
    A, (a, b) = nilpotent_free(k, 2)
    names = ordered_variables(u, v)
    if len(w1) != len(w2):
        witness = {x: a for x in names}
    else:
        j = next(i for i, (p, q) in enumerate(zip(w1, w2)) if p != q)
        witness = {x: (a if x == w1[j] else b) for x in names}
    if evaluate(A, u, witness) == evaluate(A, v, witness):
        return None
    return A, witness


def generating_models(cat: Catalog, sig: Signature) -> list[FiniteAlgebra]:
    """A few small models of the catalog variety (for tests and examples)."""
    tag = cat.tag
    if tag == "Trivial":
        return [FiniteAlgebra(sig, 1, {s: [0] for s, a in sig.operations}, name="1")]
    if tag == "Ck":
        return [nilpotent_free(cat.param, 2)[0]]
    if tag == "Un":
        return [chain_unary(cat.param, 2)]
    if tag == "Grp":
        return group_library()[:4]
    return {
        "Semilattice": [semilattice2()],
        "LeftZero": [left_zero_band()],
        "RightZero": [right_zero_band()],
        "RectBand": [direct_product(left_zero_band(), right_zero_band(), name="RB4")],
        "RS": [left_zero_band(), right_zero_band(), zero_semigroup()],
        "CS": [zero_semigroup()],
        "ConstAlg": [constant_algebra(sig)],
    }[tag]


__all__ = [
    "Catalog",
    "CatalogError",
    "MARKER",
    "TAGS",
    "catalog_base",
    "catalog_countermodel",
    "default_signature",
    "free_group_word",
    "normal_form",
    "parse_tag",
]
