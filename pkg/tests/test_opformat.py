import json
from fractions import Fraction

import pytest

from fop import corpus
from fop.errors import ParseError, SchemaError
from fop.operators import ThetaOperator, shift
from fop.opformat import from_json, parse, render, to_json
from fop.poly import Poly, RatFunc


def test_parse_no2_matches_builder():
    T = ThetaOperator.theta()
    t = ThetaOperator.function(Poly.x())
    assert parse("T^4 - t*(T+1/2)^4") == T**4 - t * (T + Fraction(1, 2)) ** 4


def test_parse_normal_ordering():
    assert parse("T*t") == parse("t*T + t")


def test_parse_whitespace_insensitive():
    assert parse(" T ^ 4 -  t * ( T + 1 / 2 ) ^ 4 ") == parse("T^4-t*(T+1/2)^4")


def test_parse_errors_with_position():
    with pytest.raises(ParseError) as err:
        parse("t^(1/2)")
    assert err.value.position == 2
    for bad in ("T^-1", "x", "1/0", "(T", "T +"):
        with pytest.raises(ParseError):
            parse(bad)


def test_render_roundtrip_corpus():
    for cid in corpus.list_ids():
        op = corpus.get(cid).operator
        assert parse(render(op)) == op


def test_render_roundtrip_shift():
    op = corpus.get("no2").operator
    sh = shift(op, Fraction(1, 2))
    assert parse(render(sh)) == sh
    assert render(parse(render(sh))) == render(sh)  # printing is idempotent


def test_render_zero():
    assert render(parse("T - T")) == "0"


def test_json_theta_example():
    doc = to_json(parse("T"))
    assert doc == {
        "order": 1,
        "theta_coeffs": [
            {"num": ["0"], "den": ["1"]},
            {"num": ["1"], "den": ["1"]},
        ],
    }


def test_json_roundtrip_corpus_byte_identical():
    for cid in corpus.list_ids():
        op = corpus.get(cid).operator
        doc = to_json(op)
        assert from_json(doc) == op
        assert json.dumps(to_json(from_json(doc))) == json.dumps(doc)


def test_json_schema_errors_carry_pointer():
    with pytest.raises(SchemaError) as err:
        from_json({"order": 1, "theta_coeffs": [
            {"num": ["0"], "den": ["1"]}, {"num": ["1"], "den": ["0"]}]})
    assert "/theta_coeffs/1/den" in str(err.value)
    with pytest.raises(SchemaError):
        from_json({"theta_coeffs": []})
    with pytest.raises(SchemaError):
        from_json({"order": 3, "theta_coeffs": [{"num": ["1"], "den": ["1"]}]})
    with pytest.raises(SchemaError):
        from_json({"order": 0, "theta_coeffs": [{"num": [1], "den": ["1"]}]})
