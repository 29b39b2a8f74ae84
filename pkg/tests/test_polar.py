import numpy as np
import pytest

from maltsev.generate import model_pool, random_member
from maltsev.models import models_of
from maltsev.polar import Polarization, classify_polarization, constancy, find_polar_terms, is_zero_term
from maltsev.product import h_closure_probe
from maltsev.terms import GROUP, GROUPOID, parse_term
from maltsev.variety import VarietyError, catalog_variety
from oracles import naive_holds


def T(text, sig=GROUPOID):
    return parse_term(text, sig)


class TestPolarTerms:
    def test_group_unit(self):
        assert T("mul(x,inv(x))", GROUP) in find_polar_terms(catalog_variety("GRP"), 2)

    def test_constant_semigroup_square(self):
        assert T("mul(x,x)") in find_polar_terms(catalog_variety("CS"), 2)

    def test_none_in_rs(self):
        assert find_polar_terms(catalog_variety("RS"), 2) == []

    def test_constancy_needs_unary_term(self):
        with pytest.raises(VarietyError):
            constancy(catalog_variety("CS"), T("mul(x,y)"))


class TestZeroTerms:
    def test_constant_semigroup(self):
        assert is_zero_term(catalog_variety("CS"), T("mul(x,x)")).proved

    def test_group_unit_is_not_zero(self):
        v = is_zero_term(catalog_variety("GRP"), T("mul(x,inv(x))", GROUP))
        assert v.refuted

    @pytest.mark.parametrize("k", [2, 3])
    def test_power(self, k):
        p = "x"
        for _ in range(k - 1):
            p = f"mul({p},x)"
        assert is_zero_term(catalog_variety(f"C{k}"), T(p)).proved


class TestClassify:
    @pytest.mark.parametrize(
        "tag,expected",
        [
            ("CS", Polarization.PURELY_POLARIZED),
            ("C3", Polarization.PURELY_POLARIZED),
            ("GRP", Polarization.POLARIZED),
            ("RS", Polarization.NOT_POLARIZED),
            ("S", Polarization.NOT_POLARIZED),
        ],
    )
    def test_catalog(self, tag, expected):
        rep = classify_polarization(catalog_variety(tag), 3)
        assert rep.classification is expected
        assert rep.to_dict()["classification"] == expected.value

    def test_polar_terms_hold_in_models(self):
        # polar terms found for C3 are constant in every small model
        C3 = catalog_variety("C3")
        rep = classify_polarization(C3, 2)
        for A in models_of(GROUPOID, C3.base, 3):
            for p in rep.polar_terms:
                assert naive_holds(A, p, parse_term(str(p).replace("x", "y"), GROUPOID))

    def test_render_names_the_class(self):
        assert "purely polarized" in classify_polarization(catalog_variety("CS"), 2).render()


@pytest.mark.parametrize("inner,outer", [("LZ", "CS"), ("RS", "CS"), ("S", "C2")])
def test_purely_polarized_outer_gives_no_violations(inner, outer):
    V, W = catalog_variety(inner), catalog_variety(outer)
    rng = np.random.default_rng(17)
    ip, op = model_pool(V), model_pool(W)
    for _ in range(25):
        M = random_member(V, W, rng, 6, ip, op)
        assert h_closure_probe(M, V, W).violations == []
