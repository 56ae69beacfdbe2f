import json
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import points
from pentagram.configio import (
    ConfigDocument,
    SchemaError,
    document_from_dict,
    document_to_dict,
    emit_config,
    format_scalar,
    parse_config,
    parse_documents,
    parse_rational,
)
from pentagram.kernel import EXACT, EXTENDED, FLOAT, Mode, Point


def exact_doc(coords):
    return {"schema_version": "1", "mode": "exact", "points": [[x, y] for x, y in coords]}


FIVE = [("0", "0"), ("4", "0"), ("5", "3"), ("2", "5"), ("-1", "3")]


def test_canonicalization():
    doc = document_from_dict(exact_doc([("3/6", "-4/2")] + FIVE[1:]))
    assert doc.points[0] == Point(F(1, 2), F(-2))
    assert document_to_dict(doc)["points"][0] == ["1/2", "-2"]


@pytest.mark.parametrize("text", ["1/0", "1.5", "1/-2", "a", "", " 1", "1/2/3", "+-1"])
def test_malformed_rationals(text):
    with pytest.raises(SchemaError):
        parse_rational(text, "$.x")


def test_non_string_rational():
    with pytest.raises(SchemaError, match="strings"):
        document_from_dict(exact_doc([(1, "0")] + FIVE[1:]))


def test_error_paths():
    with pytest.raises(SchemaError) as info:
        document_from_dict(exact_doc(FIVE[:4]))
    assert info.value.path == "$.points"
    with pytest.raises(SchemaError) as info:
        document_from_dict(exact_doc(FIVE[:2] + [("1/0", "1")] + FIVE[3:]))
    assert info.value.path == "$.points[2][0]"
    with pytest.raises(SchemaError):
        document_from_dict({**exact_doc(FIVE), "schema_version": "2"})
    with pytest.raises(SchemaError):
        document_from_dict({**exact_doc(FIVE), "precision_bits": 53})
    with pytest.raises(SchemaError):
        document_from_dict({**exact_doc(FIVE), "derived": {"Z": []}})
    with pytest.raises(SchemaError):
        parse_config("{not json")


def test_exact_round_trip_byte_identical():
    text = emit_config(document_from_dict(exact_doc(FIVE)))
    assert emit_config(parse_config(text)) == text
    assert all(isinstance(v, str) for pair in json.loads(text)["points"] for v in pair)


@given(st.lists(points(1000, 997), min_size=5, max_size=5))
def test_exact_round_trip_property(pts):
    doc = ConfigDocument(EXACT, pts, {"B": pts, "X": [pts[0]]}, {"note": "kept"})
    assert parse_config(emit_config(doc)) == doc


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=10, max_size=10))
def test_float_round_trip(values):
    pts = [Point(values[2 * i], values[2 * i + 1]) for i in range(5)]
    doc = ConfigDocument(FLOAT, pts)
    back = parse_config(emit_config(doc))
    assert back.points == pts and back.mode == FLOAT


def test_extended_round_trip():
    with EXTENDED.context():
        pts = [Point(mpmath.mpf(1) / (k + 3), mpmath.sqrt(k + 2)) for k in range(5)]
        doc = ConfigDocument(EXTENDED, pts)
        text = emit_config(doc)
        back = parse_config(text)
        assert back.points == pts
    assert json.loads(text)["precision_bits"] == 256


def test_collection():
    one = exact_doc(FIVE)
    docs = parse_documents(json.dumps({"schema_version": "1", "configurations": [one, one]}))
    assert len(docs) == 2 and docs[0] == docs[1]
    with pytest.raises(SchemaError) as info:
        parse_documents(json.dumps({"schema_version": "1", "configurations": [one, exact_doc(FIVE[:3])]}))
    assert info.value.path.startswith("$.configurations[1]")


def test_format_scalar():
    assert format_scalar(F(6, -4)) == "-3/2"
    assert format_scalar(0.1) == "0.1"
    with Mode(exact=False, bits=128).context():
        third = mpmath.mpf(1) / 3
        text = format_scalar(third, 128)
        assert mpmath.mpf(text) == third
    assert text.startswith("3.3333") and len(text) > 38
