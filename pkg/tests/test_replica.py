import pytest
from hypothesis import given, settings

from maltsev.algebra import evaluate, quotient_algebra, satisfies_identity
from maltsev.partition import Partition
from maltsev.replica import class_structure, replica_congruence, rho0_bounded, rho0_profile
from maltsev.terms import GROUPOID
from maltsev.variety import VarietyError, VarietySpec, catalog_variety, decide_identity
from oracles import least_congruence_with_quotient_in
from support import example_inner, groupoids, random_groupoid, random_monounary

S = catalog_variety("S")
CS = catalog_variety("CS")


def P(A, *blocks):
    return Partition.from_blocks(A.size, [[A.element(x) for x in b] for b in blocks])


def as_blocks(p):
    return frozenset(frozenset(b) for b in p.blocks())


class TestReplica:
    def test_a4_semilattice(self, A):
        assert replica_congruence(A, S) == P(A, "ae", "bf")

    def test_a4_quotient_is_total(self, A):
        Q = quotient_algebra(A, P(A, "a", "b", "ef"))
        assert replica_congruence(Q, S).is_total

    def test_trivial_and_empty_base(self, A):
        assert replica_congruence(A, catalog_variety("TRIVIAL")).is_total
        assert replica_congruence(A, VarietySpec("all", GROUPOID, ())).is_identity

    def test_signature_mismatch(self, A):
        with pytest.raises(VarietyError):
            replica_congruence(A, catalog_variety("U1"))


class TestRho0:
    def test_a4_pair_via_idempotence(self, A):
        rel = rho0_bounded(A, S, 2)
        a, e = A.element("a"), A.element("e")
        assert (a, e) in rel
        w = rel.witnesses[(a, e)]
        assert evaluate(A, w.lhs, w.assignment) == a
        assert evaluate(A, w.rhs, w.assignment) == e
        assert decide_identity(S, w.lhs, w.rhs).proved

    def test_reflexive_symmetric(self, A):
        rel = rho0_bounded(A, S, 2)
        assert all(rel.relation[c, c] for c in range(4))
        assert (rel.relation == rel.relation.T).all()

    def test_closure_reaches_replica_on_a4(self, A):
        prof = rho0_profile(A, S, 2)
        assert prof.closures[-1][1] == P(A, "ae", "bf")
        assert prof.stabilized_at is not None and prof.stabilized_at <= 2

    def test_needs_decision_procedure(self, A):
        with pytest.raises(VarietyError):
            rho0_bounded(A, example_inner(), 1)

    @pytest.mark.parametrize("tag", ["S", "RS", "CS", "LZ"])
    def test_monotone_and_below_replica(self, tag, rng):
        W = catalog_variety(tag)
        for _ in range(10):
            B = random_groupoid(rng, int(rng.integers(2, 5)))
            rho = replica_congruence(B, W)
            prev = None
            for bound in range(3):
                rel = rho0_bounded(B, W, bound, variables=("x1", "x2", "x3"))
                assert rel.closure() <= rho
                if prev is not None:
                    assert (prev <= rel.relation).all()
                prev = rel.relation
                for (a, b), w in rel.witnesses.items():
                    assert evaluate(B, w.lhs, w.assignment) == a
                    assert evaluate(B, w.rhs, w.assignment) == b
                    assert decide_identity(W, w.lhs, w.rhs, model_bound=0).proved


class TestClassStructure:
    def test_a4_semilattice(self, A):
        rep = class_structure(A, S)
        assert [b.is_subalgebra for b in rep.blocks] == [True, True]
        assert rep.consistent

    def test_a4_constant_semigroup(self, A):
        rep = class_structure(A, CS)
        got = {frozenset(A.element_name(x) for x in b.members): (b.is_singleton, b.is_subalgebra) for b in rep.blocks}
        assert got == {frozenset("a"): (True, False), frozenset("ebf"): (False, True)}

    @pytest.mark.parametrize("tag", ["CS", "C3"])
    def test_purely_polarized_single_subalgebra_block(self, tag, rng):
        W = catalog_variety(tag)
        for _ in range(30):
            B = random_groupoid(rng, int(rng.integers(1, 6)))
            rep = class_structure(B, W)
            subs = [b for b in rep.blocks if b.is_subalgebra]
            assert len(subs) == 1
            assert all(b.is_singleton for b in rep.blocks if not b.is_subalgebra)


@pytest.mark.parametrize("tag", ["S", "CS", "RS", "LZ", "RZ", "RB", "C2"])
@settings(max_examples=30, deadline=None)
@given(B=groupoids(5))
def test_minimality_oracle(tag, B):
    W = catalog_variety(tag)
    rho = replica_congruence(B, W)
    assert as_blocks(rho) == least_congruence_with_quotient_in(B, W.base)


@pytest.mark.parametrize("tag", ["S", "CS", "RS", "LZ", "RB", "C3"])
@settings(max_examples=40, deadline=None)
@given(B=groupoids(5))
def test_quotient_law_and_subalgebra_fact(tag, B):
    W = catalog_variety(tag)
    rho = replica_congruence(B, W)
    Q = quotient_algebra(B, rho)
    assert all(satisfies_identity(Q, e)[0] for e in W.base)
    assert class_structure(B, W).consistent


@pytest.mark.parametrize("tag", ["RS", "CS", "CT", "C2", "C3"])
def test_singleton_classes_groupoid(tag, rng):
    W = catalog_variety(tag)
    for _ in range(60):
        B = random_groupoid(rng, int(rng.integers(1, 6)))
        for b in class_structure(B, W).blocks:
            assert b.is_idempotent_in_quotient or b.is_singleton


@pytest.mark.parametrize("tag", ["U0", "U1", "U2", "U3"])
def test_singleton_classes_monounary(tag, rng):
    W = catalog_variety(tag)
    for _ in range(60):
        B = random_monounary(rng, int(rng.integers(1, 6)))
        for b in class_structure(B, W).blocks:
            assert b.is_idempotent_in_quotient or b.is_singleton

