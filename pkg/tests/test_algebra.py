import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maltsev.algebra import (
    AlgebraError,
    FiniteAlgebra,
    direct_product,
    evaluate,
    idempotent_elements,
    one_element,
    quotient_algebra,
    satisfies_identity,
    subalgebra,
    subuniverse_generated,
)
from maltsev.catalog import left_zero_band, right_zero_band, semilattice2
from maltsev.congruence import congruence_generated
from maltsev.partition import Partition
from maltsev.terms import GROUPOID, Identity, enumerate_terms, parse_identity, parse_term
from oracles import closure, naive_eval, naive_holds
from support import groupoids, partitions_of, terms


def ident(text):
    return parse_identity(text, GROUPOID)


def term(text):
    return parse_term(text, GROUPOID)


def theta(A):
    return Partition.from_blocks(4, [[A.element("a")], [A.element("b")], [A.element("e"), A.element("f")]])


class TestEvaluate:
    def test_table_entry(self, A):
        assert evaluate(A, term("mul(x,y)"), {"x": A.element("e"), "y": A.element("b")}) == A.element("f")

    def test_composed(self, A):
        assert evaluate(A, term("mul(mul(x,x),y)"), {"x": A.element("a"), "y": A.element("b")}) == A.element("f")

    def test_variable(self, A):
        for c in range(4):
            assert evaluate(A, term("x"), {"x": c}) == c

    def test_out_of_range_table_rejected(self):
        with pytest.raises(AlgebraError):
            FiniteAlgebra(GROUPOID, 2, {"mul": [0, 1, 2, 0]})


class TestSatisfies:
    def test_a4_not_constant(self, A):
        ok, wit = satisfies_identity(A, ident("mul(x,y) = mul(z,t)"))
        assert not ok
        assert evaluate(A, term("mul(x,y)"), wit) != evaluate(A, term("mul(z,t)"), wit)
        # first falsifying assignment in odometer order over x, y, z, t
        assert wit == {"x": 0, "y": 0, "z": 0, "t": 2}

    def test_semilattice_commutative(self):
        assert satisfies_identity(semilattice2(), ident("mul(x,y) = mul(y,x)"))[0]

    def test_quotient_not_constant(self, A):
        Q = quotient_algebra(A, theta(A))
        assert not satisfies_identity(Q, ident("mul(x,y) = mul(z,t)"))[0]


class TestIdempotents:
    def test_a4(self, A):
        assert idempotent_elements(A) == {A.element("e"), A.element("f")}

    def test_left_zero(self):
        assert idempotent_elements(left_zero_band(2)) == {0, 1}

    def test_z3(self):
        Z3 = FiniteAlgebra.from_functions(GROUPOID, 3, {"mul": lambda a, b: (a + b) % 3})
        assert idempotent_elements(Z3) == {0}


class TestSubuniverse:
    def test_a4(self, A):
        assert subuniverse_generated(A, [A.element("a")]) == {A.element("a"), A.element("e")}
        assert subuniverse_generated(A, [A.element("b")]) == {A.element("b"), A.element("f")}

    def test_full(self, A):
        assert subuniverse_generated(A, range(4)) == set(range(4))

    def test_subalgebra_rejects_open_set(self, A):
        with pytest.raises(AlgebraError):
            subalgebra(A, [A.element("a")])


class TestQuotient:
    def test_a4_table(self, A):
        Q = quotient_algebra(A, theta(A))
        # expected entries keyed by block name
        expected = {
            ("a", "a"): "{e,f}", ("a", "b"): "b", ("a", "{e,f}"): "{e,f}",
            ("b", "a"): "b", ("b", "b"): "{e,f}", ("b", "{e,f}"): "{e,f}",
            ("{e,f}", "a"): "{e,f}", ("{e,f}", "b"): "{e,f}", ("{e,f}", "{e,f}"): "{e,f}",
        }
        got = {
            (Q.element_name(i), Q.element_name(j)): Q.element_name(Q.apply("mul", i, j))
            for i in range(3)
            for j in range(3)
        }
        assert got == expected
        # blocks are numbered by least member: a < e < b
        assert Q.names == ("a", "{e,f}", "b")

    def test_identity_partition(self, A):
        Q = quotient_algebra(A, Partition.identity(4))
        assert Q.table_key() == A.table_key()

    def test_total_partition(self, A):
        Q = quotient_algebra(A, Partition.total(4))
        assert Q.size == 1

    def test_non_congruence_rejected(self, A):
        with pytest.raises(AlgebraError):
            quotient_algebra(A, Partition.from_blocks(4, [[0, 2], [1, 3]]))


class TestProduct:
    def test_rectangular_band(self):
        P = direct_product(left_zero_band(2), right_zero_band(2))
        assert P.size == 4
        for i in range(4):
            for j in range(4):
                a, b = divmod(i, 2)
                c, d = divmod(j, 2)
                assert P.apply("mul", i, j) == a * 2 + d
        assert satisfies_identity(P, ident("mul(mul(x,y),z) = mul(x,z)"))[0]
        assert satisfies_identity(P, ident("mul(x,x) = x"))[0]

    def test_with_trivial(self, A):
        P = direct_product(A, one_element(GROUPOID))
        assert P.table_key() == A.table_key()


@settings(max_examples=100, deadline=None)
@given(groupoids(4), st.data())
def test_quotient_compatibility(B, data):
    pairs = data.draw(st.lists(st.tuples(st.integers(0, B.size - 1), st.integers(0, B.size - 1)), max_size=2))
    th = congruence_generated(B, pairs)
    Q = quotient_algebra(B, th)
    index = th.block_index()
    t = data.draw(terms(GROUPOID, ("x", "y"), 6))
    asg = {"x": data.draw(st.integers(0, B.size - 1)), "y": data.draw(st.integers(0, B.size - 1))}
    assert index[evaluate(B, t, asg)] == evaluate(Q, t, {k: index[v] for k, v in asg.items()})


@settings(max_examples=60, deadline=None)
@given(groupoids(3), groupoids(3), terms(GROUPOID, ("x", "y", "z"), 5), terms(GROUPOID, ("x", "y", "z"), 5))
def test_product_preservation(B, C, lhs, rhs):
    e = Identity(lhs, rhs)
    P = direct_product(B, C)
    assert satisfies_identity(P, e)[0] == (satisfies_identity(B, e)[0] and satisfies_identity(C, e)[0])


@settings(max_examples=100, deadline=None)
@given(groupoids(5), st.data())
def test_subuniverse_closure(B, data):
    seed = data.draw(st.sets(st.integers(0, B.size - 1), min_size=1))
    S = subuniverse_generated(B, seed)
    assert S == closure(B, seed)
    t = data.draw(terms(GROUPOID, ("x", "y"), 6))
    vals = sorted(S)
    asg = {"x": data.draw(st.sampled_from(vals)), "y": data.draw(st.sampled_from(vals))}
    assert evaluate(B, t, asg) in S


@settings(max_examples=150, deadline=None)
@given(groupoids(4), terms(GROUPOID, ("x", "y", "z"), 5), terms(GROUPOID, ("x", "y", "z"), 5))
def test_witness_validity_and_oracle(B, lhs, rhs):
    ok, wit = satisfies_identity(B, Identity(lhs, rhs))
    assert ok == naive_holds(B, lhs, rhs)
    if not ok:
        assert naive_eval(B, lhs, wit) != naive_eval(B, rhs, wit)


@settings(max_examples=60, deadline=None)
@given(groupoids(4), terms(GROUPOID, ("x", "y", "z"), 5), terms(GROUPOID, ("x", "y", "z"), 5))
def test_batched_check_agrees(B, lhs, rhs):
    # a tiny grid limit forces the outer loop over leading variables
    import maltsev.algebra as alg

    full = satisfies_identity(B, Identity(lhs, rhs))
    old = alg.GRID_LIMIT
    alg.GRID_LIMIT = 2
    try:
        assert satisfies_identity(B, Identity(lhs, rhs)) == full
    finally:
        alg.GRID_LIMIT = old


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: partitions_of(n)))
def test_partition_from_labels(labels):
    n = len(labels)
    blocks = {}
    for i, lab in enumerate(labels):
        blocks.setdefault(lab, []).append(i)
    p = Partition.from_blocks(n, blocks.values())
    assert sorted(map(tuple, blocks.values())) == sorted(p.blocks())


def test_evaluate_matches_oracle_on_random_terms(rng):
    B = FiniteAlgebra(GROUPOID, 4, {"mul": rng.integers(0, 4, 16)})
    for t in enumerate_terms(GROUPOID, ("x", "y"), 3):
        for a in range(4):
            for b in range(4):
                assert evaluate(B, t, {"x": a, "y": b}) == naive_eval(B, t, {"x": a, "y": b})
    assert np.all(B.tables["mul"] < 4)
