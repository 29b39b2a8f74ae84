"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

from hypothesis import strategies as st

from maltsev.algebra import FiniteAlgebra
from maltsev.terms import GROUPOID, MONOUNARY, App, Var, parse_identity
from maltsev.variety import VarietySpec

# The 4-element groupoid used throughout; rows and columns in the order a, e, b, f.
A4_NAMES = ("a", "e", "b", "f")
A4_ROWS = (
    ("e", "e", "b", "f"),
    ("e", "e", "f", "f"),
    ("b", "f", "f", "f"),
    ("f", "f", "f", "f"),
)


def groupoid_a4() -> FiniteAlgebra:
    idx = {n: i for i, n in enumerate(A4_NAMES)}
    table = [idx[v] for row in A4_ROWS for v in row]
    return FiniteAlgebra(GROUPOID, 4, {"mul": table}, names=A4_NAMES, name="A")


def example_inner() -> VarietySpec:
    """Groupoids with (xx)y = y = y(xx)."""
    base = (parse_identity("mul(mul(x,x),y) = y", GROUPOID), parse_identity("mul(y,mul(x,x)) = y", GROUPOID))
    return VarietySpec("V", GROUPOID, base)


def random_groupoid(rng, n):
    return FiniteAlgebra(GROUPOID, n, {"mul": rng.integers(0, n, size=n * n)}, name=f"G{n}")


def random_monounary(rng, n):
    return FiniteAlgebra(MONOUNARY, n, {"f": rng.integers(0, n, size=n)}, name=f"M{n}")


def terms(sig, names=("x", "y", "z"), max_leaves=8):
    """Hypothesis strategy for terms over ``sig``."""
    leaves = st.sampled_from([Var(v) for v in names])

    def extend(children):
        return st.one_of(
            *[
                st.tuples(*([children] * arity)).map(lambda args, s=symbol: App(s, args))
                for symbol, arity in sig.operations
            ]
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def groupoids(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    table = draw(st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n))
    return FiniteAlgebra(GROUPOID, n, {"mul": table}, name=f"H{n}")


@st.composite
def partitions_of(draw, n):
    labels = [0]
    for _ in range(1, n):
        labels.append(draw(st.integers(0, max(labels) + 1)))
    return labels
