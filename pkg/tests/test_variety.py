from itertools import product

import pytest
from hypothesis import given, settings

from maltsev.algebra import FiniteAlgebra, satisfies_identity
from maltsev.catalog import catalog_base
from maltsev.models import enumerate_models, models_of
from maltsev.terms import GROUP, GROUPOID, MONOUNARY, Identity, Var, enumerate_terms, parse_identity, parse_term
from maltsev.variety import (
    AssertedRewrite,
    Status,
    VarietyError,
    VarietySpec,
    catalog_variety,
    countermodel_search,
    decide_identity,
    is_term_idempotent,
    normal_form,
)
from oracles import naive_holds
from support import example_inner, terms

GROUPOID_TAGS = ["S", "LZ", "RZ", "RB", "RS", "CS", "CT", "C2", "C3", "TRIVIAL"]


def T(text, sig=GROUPOID):
    return parse_term(text, sig)


def decide(tag, lhs, rhs, sig=GROUPOID, **kw):
    V = catalog_variety(tag)
    return decide_identity(V, T(lhs, sig), T(rhs, sig), **kw)


class TestDecide:
    def test_semilattice_regular(self):
        assert decide("S", "mul(x,mul(y,z))", "mul(mul(z,y),x)").proved

    def test_semilattice_irregular(self):
        v = decide("S", "mul(x,y)", "x")
        assert v.refuted and v.recheck(catalog_variety("S"))

    def test_constant_semigroup(self):
        assert decide("CS", "mul(x,y)", "mul(z,t)").proved

    def test_u2_countermodel_has_three_elements(self):
        v = decide("U2", "f(x)", "f(f(x))", MONOUNARY)
        assert v.refuted
        assert v.model.size == 3
        assert v.recheck(catalog_variety("U2"))

    def test_generic_one_step(self):
        v = decide_identity(example_inner(), T("mul(x,mul(y,y))"), T("x"))
        assert v.proved
        assert "one step" in v.evidence

    def test_generic_unknown_when_search_disabled(self):
        v = decide_identity(example_inner(), T("mul(x,y)"), T("mul(y,x)"), model_bound=0)
        assert v.unknown
        assert v.bounds == {"model_bound": 0}

    def test_generic_refuted_by_search(self):
        v = decide_identity(example_inner(), T("mul(x,y)"), T("x"))
        assert v.refuted and v.recheck(example_inner())

    def test_generic_never_proves_beyond_one_step(self):
        # true in V (x(yy) = x twice) but needs two steps
        v = decide_identity(example_inner(), T("mul(mul(x,mul(y,y)),mul(z,z))"), T("x"), model_bound=2)
        assert v.unknown

    def test_group(self):
        assert decide("GRP", "mul(x,inv(mul(y,x)))", "inv(y)", GROUP).proved
        v = decide("GRP", "mul(x,y)", "mul(y,x)", GROUP)
        assert v.refuted and v.recheck(catalog_variety("GRP"))

    def test_signature_mismatch(self):
        with pytest.raises(VarietyError):
            decide_identity(catalog_variety("S"), T("f(x)", MONOUNARY), Var("x"))


class TestNormalForm:
    @pytest.mark.parametrize(
        "tag,sig,term,expected",
        [
            ("RS", GROUPOID, "mul(x,mul(y,y))", "mul(x,y)"),
            ("U3", MONOUNARY, "f(f(f(f(f(x)))))", "f(f(f(x)))"),
            ("LZ", GROUPOID, "mul(mul(x,y),z)", "x"),
            ("RZ", GROUPOID, "mul(mul(x,y),z)", "z"),
            ("S", GROUPOID, "mul(y,mul(x,y))", "mul(x,y)"),
        ],
    )
    def test_examples(self, tag, sig, term, expected):
        assert normal_form(catalog_variety(tag), T(term, sig)) == T(expected, sig)

    def test_left_zero_against_models(self):
        t = T("mul(mul(x,y),z)")
        for A in models_of(GROUPOID, catalog_base(catalog_variety("LZ").decision, GROUPOID), 3):
            assert naive_holds(A, t, Var("x"))

    def test_no_procedure_for_generic(self):
        with pytest.raises(VarietyError):
            normal_form(example_inner(), Var("x"))


class TestTermIdempotent:
    def test_rs_non_variable(self):
        assert is_term_idempotent(catalog_variety("RS"), T("mul(x,y)")).proved

    def test_rs_variable(self):
        v = is_term_idempotent(catalog_variety("RS"), Var("x"))
        assert v.refuted
        bad = next(p for p in v.parts if p.refuted)
        assert bad.model.size == 2
        assert bad.recheck(catalog_variety("RS"))

    def test_group_unit(self):
        assert is_term_idempotent(catalog_variety("GRP"), T("mul(x,inv(x))", GROUP)).proved


class TestCountermodelSearch:
    def test_commutativity_of_semigroups(self):
        V = VarietySpec("Sg", GROUPOID, (parse_identity("mul(mul(x,y),z) = mul(x,mul(y,z))", GROUPOID),))
        A, w = countermodel_search(V, parse_identity("mul(x,y) = mul(y,x)", GROUPOID), 2)
        assert A.size == 2
        assert satisfies_identity(A, parse_identity("mul(x,y) = x", GROUPOID))[0]
        assert not naive_holds(A, T("mul(x,y)"), T("mul(y,x)"))

    def test_none_in_cs(self):
        V = catalog_variety("CS")
        assert countermodel_search(V, parse_identity("mul(x,y) = mul(z,t)", GROUPOID), 3) is None

    def test_u2_three_elements(self):
        V = catalog_variety("U2")
        A, _ = countermodel_search(V, parse_identity("f(x) = f(f(x))", MONOUNARY), 3)
        assert A.size == 3


class TestModels:
    def test_semigroup_counts(self):
        # labelled semigroups of order 1, 2, 3
        assoc = [parse_identity("mul(mul(x,y),z) = mul(x,mul(y,z))", GROUPOID)]
        assert [sum(1 for _ in enumerate_models(GROUPOID, assoc, n)) for n in (1, 2, 3)] == [1, 8, 113]

    @pytest.mark.parametrize("tag", GROUPOID_TAGS)
    def test_models_match_brute_force(self, tag):
        V = catalog_variety(tag)
        for n in (1, 2):
            got = {tuple(A.flat_table("mul")) for A in enumerate_models(GROUPOID, V.base, n)}
            want = set()
            for table in product(range(n), repeat=n * n):
                B = FiniteAlgebra(GROUPOID, n, {"mul": table})
                if all(naive_holds(B, e.lhs, e.rhs) for e in V.base):
                    want.add(tuple(table))
            assert got == want


class TestAssertedRewrite:
    def test_rules_decide(self):
        rules = ((T("mul(x,y)", GROUP), Var("x")), (T("inv(x)", GROUP), Var("x")))
        W = VarietySpec("W", GROUP, tuple(Identity(*r) for r in rules), AssertedRewrite(rules))
        v = decide_identity(W, T("mul(inv(x),mul(y,x))", GROUP), Var("x"))
        assert v.proved and "convergent" in v.evidence

    def test_bad_rule(self):
        with pytest.raises(VarietyError):
            AssertedRewrite(((Var("x"), T("mul(x,x)")),))
        with pytest.raises(VarietyError):
            AssertedRewrite(((T("mul(x,x)"), Var("y")),))


@pytest.mark.parametrize("tag", ["S", "LZ", "RZ", "RB", "RS", "CS", "C3"])
@settings(max_examples=40, deadline=None)
@given(t=terms(GROUPOID))
def test_normal_form_idempotent(tag, t):
    V = catalog_variety(tag)
    nf = normal_form(V, t)
    assert normal_form(V, nf) == nf
    assert decide_identity(V, t, nf, model_bound=0).proved


@pytest.mark.parametrize("tag", ["S", "RB", "RS", "CS", "C2"])
@settings(max_examples=40, deadline=None)
@given(u=terms(GROUPOID, max_leaves=5), v=terms(GROUPOID, max_leaves=5))
def test_trichotomy_and_soundness(tag, u, v):
    V = catalog_variety(tag)
    verdict = decide_identity(V, u, v)
    assert verdict.status is not Status.UNKNOWN
    holds_everywhere = all(naive_holds(A, u, v) for A in models_of(GROUPOID, V.base, 3))
    if verdict.proved:
        assert holds_everywhere
    else:
        assert not holds_everywhere
        assert verdict.recheck(V)


@pytest.mark.parametrize("tag", ["RS", "CS", "CT", "C2", "C3"])
def test_term_idempotent_variety_law(tag):
    V = catalog_variety(tag)
    ts = enumerate_terms(GROUPOID, ("x", "y"), 3)
    for u in ts[::3]:
        for v in ts[::5]:
            if u != v and decide_identity(V, u, v, model_bound=0).proved:
                assert is_term_idempotent(V, u, 0).proved
                assert is_term_idempotent(V, v, 0).proved


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_unary_term_idempotent_variety_law(n):
    V = catalog_variety(f"U{n}")
    ts = enumerate_terms(MONOUNARY, ("x", "y"), 5)
    for u in ts:
        for v in ts:
            if u != v and decide_identity(V, u, v, model_bound=0).proved:
                assert is_term_idempotent(V, u, 0).proved and is_term_idempotent(V, v, 0).proved
