import pytest
from hypothesis import given, settings

from maltsev.fileio import (
    FormatError,
    algebra_to_dict,
    bundled_algebra,
    bundled_names,
    format_algebra,
    format_variety,
    parse_algebra,
    parse_variety,
    read_algebra,
    write_algebra,
)
from maltsev.terms import GROUPOID, parse_term
from maltsev.variety import AssertedRewrite, Generic, catalog_variety, decide_identity
from support import groupoids, groupoid_a4, random_monounary


def test_bundled_groupoid_a4():
    assert "paper_A.alg" in bundled_names()
    B = bundled_algebra("paper_A.alg")
    assert B == groupoid_a4()
    assert B.names == ("a", "e", "b", "f")


def test_missing_bundled():
    with pytest.raises(FileNotFoundError):
        bundled_algebra("nope.alg")


@settings(max_examples=40, deadline=None)
@given(B=groupoids(5))
def test_round_trip(B):
    assert parse_algebra(format_algebra(B)) == B


def test_round_trip_unary_file(tmp_path, rng):
    B = random_monounary(rng, 5)
    path = tmp_path / "u.alg"
    write_algebra(B, path)
    assert read_algebra(path) == B
    assert algebra_to_dict(B)["operations"][0]["arity"] == 1


@pytest.mark.parametrize(
    "text",
    [
        "size 2\nop mul 2\n0 0 0 0\n",
        "algebra A\nsize 2\n",
        "algebra A\nsize 2\nop mul 2\n0 0 0\n",
        "algebra A\nsize 2\nop mul 2\n0 0 0 5\n",
        "algebra A\nsize 2\n0 1\n",
        "algebra A\nsize two\nop mul 2\n0 0 0 0\n",
    ],
)
def test_bad_algebra(text):
    with pytest.raises(FormatError):
        parse_algebra(text)


def test_comments_ignored():
    A = parse_algebra("# a table\nalgebra A  # name\nsize 1\nop mul 2\n0\n")
    assert A.size == 1


class TestVariety:
    def test_generic(self):
        V = parse_variety("variety V\nop mul 2\nidentity mul(x,mul(y,y)) = x\nidentity mul(mul(x,x),y) = y\n")
        assert isinstance(V.decision, Generic)
        assert len(V.base) == 2 and V.sig.arity("mul") == 2

    def test_catalog(self):
        V = parse_variety("variety W\ncatalog RS\n")
        assert V.base == catalog_variety("RS").base
        assert decide_identity(V, parse_term("mul(x,mul(y,y))", GROUPOID), parse_term("mul(x,y)", GROUPOID)).proved

    def test_catalog_rejects_false_identity(self):
        with pytest.raises(FormatError):
            parse_variety("variety W\ncatalog S\nidentity mul(x,y) = x\n")

    def test_rewrite(self):
        V = parse_variety("variety W\nop mul 2\nop inv 1\nrewrite mul(x,y) -> x\nrewrite inv(x) -> x\n")
        assert isinstance(V.decision, AssertedRewrite)
        assert len(V.base) == 2

    @pytest.mark.parametrize(
        "text",
        [
            "op mul 2\n",
            "variety V\n",
            "variety V\nop mul two\n",
            "variety V\nop mul 2\nfrobnicate\n",
            "variety V\ncatalog RS\nrewrite mul(x,y) -> x\n",
            "variety V\nop mul 2\nrewrite x -> mul(x,x)\n",
            "variety V\nop mul 2\nidentity mul(x) = x\n",
            "variety V\ncatalog XYZ\n",
        ],
    )
    def test_bad(self, text):
        with pytest.raises(FormatError):
            parse_variety(text)

    @pytest.mark.parametrize("text", ["variety W\ncatalog CS\n", "variety W\nop f 1\nrewrite f(f(x)) -> f(x)\n"])
    def test_round_trip(self, text):
        V = parse_variety(text)
        again = parse_variety(format_variety(V))
        assert again.base == V.base and again.sig == V.sig and type(again.decision) is type(V.decision)
