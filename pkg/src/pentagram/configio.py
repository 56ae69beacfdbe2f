"""ConfigDocument JSON: five input points plus an optional derived-object cache.

Exact values are strings ``"p/q"`` (or ``"p"``) in lowest terms, float values
are decimal strings carrying enough digits to round-trip at the document's
precision. Numbers are never written as JSON numbers.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath

from .kernel import Mode, Point, Scalar, is_exact

SCHEMA_VERSION = "1"
DERIVED_KEYS = ("B", "C", "K", "L", "D", "E", "O", "J", "X")
_SINGLE = {"O", "J", "X"}

_RATIONAL = re.compile(r"^([+-]?)(\d+)(?:/(\d+))?$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def digits_for_bits(bits: int) -> int:
    return math.ceil(bits * math.log10(2)) + 1


def format_scalar(value: Scalar, bits: int | None = None) -> str:
    if is_exact(value):
        return str(Fraction(value))
    if isinstance(value, mpmath.mpf):
        if bits is None:
            bits = max(53, int(value.man).bit_length())
        return mpmath.nstr(value, digits_for_bits(bits), strip_zeros=False, min_fixed=-1, max_fixed=-1) \
            if value != 0 else "0.0"
    return repr(float(value))


def format_point(p: Point, bits: int | None = None) -> list[str]:
    return [format_scalar(p.x, bits), format_scalar(p.y, bits)]


def parse_rational(text: Any, path: str) -> Fraction:
    if not isinstance(text, str):
        raise SchemaError(path, f"exact values must be strings, got {type(text).__name__}")
    m = _RATIONAL.match(text)
    if not m:
        raise SchemaError(path, f"malformed rational {text!r}")
    sign, num, den = m.groups()
    den_value = int(den) if den is not None else 1
    if den_value == 0:
        raise SchemaError(path, f"zero denominator in {text!r}")
    value = Fraction(int(num), den_value)
    return -value if sign == "-" else value


def parse_decimal(text: Any, mode: Mode, path: str) -> Scalar:
    if not isinstance(text, str):
        raise SchemaError(path, f"float values must be strings, got {type(text).__name__}")
    if not _DECIMAL.match(text):
        raise SchemaError(path, f"malformed decimal {text!r}")
    if mode.bits == 53:
        return float(text)
    with mode.context():
        return mpmath.mpf(text)


@dataclass
class ConfigDocument:
    mode: Mode
    points: list[Point]
    derived: dict[str, list[Point]] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfigDocument):
            return NotImplemented
        return (self.mode, self.points, self.derived, self.extra) == (
            other.mode, other.points, other.derived, other.extra
        )


def _parse_point(raw: Any, mode: Mode, path: str) -> Point:
    if not isinstance(raw, list) or len(raw) != 2:
        raise SchemaError(path, "a point is an [x, y] pair")
    if mode.exact:
        return Point(parse_rational(raw[0], f"{path}[0]"), parse_rational(raw[1], f"{path}[1]"))
    return Point(parse_decimal(raw[0], mode, f"{path}[0]"), parse_decimal(raw[1], mode, f"{path}[1]"))


def document_from_dict(data: Any, path: str = "$") -> ConfigDocument:
    if not isinstance(data, dict):
        raise SchemaError(path, "document must be an object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"{path}.schema_version", f"expected {SCHEMA_VERSION!r}")
    mode_name = data.get("mode")
    if mode_name == "exact":
        if "precision_bits" in data:
            raise SchemaError(f"{path}.precision_bits", "only allowed in float mode")
        mode = Mode(exact=True)
    elif mode_name == "float":
        bits = data.get("precision_bits", 53)
        if not isinstance(bits, int) or isinstance(bits, bool) or bits < 2:
            raise SchemaError(f"{path}.precision_bits", "must be an integer >= 2")
        mode = Mode(exact=False, bits=bits)
    else:
        raise SchemaError(f"{path}.mode", "must be 'exact' or 'float'")
    raw_points = data.get("points")
    if not isinstance(raw_points, list) or len(raw_points) != 5:
        raise SchemaError(f"{path}.points", "exactly 5 points required")
    points = [_parse_point(p, mode, f"{path}.points[{i}]") for i, p in enumerate(raw_points)]
    derived: dict[str, list[Point]] = {}
    raw_derived = data.get("derived", {})
    if not isinstance(raw_derived, dict):
        raise SchemaError(f"{path}.derived", "must be an object")
    for key, value in raw_derived.items():
        kpath = f"{path}.derived.{key}"
        if key not in DERIVED_KEYS:
            raise SchemaError(kpath, "unknown derived object")
        if key in _SINGLE:
            derived[key] = [_parse_point(value, mode, kpath)]
        else:
            if not isinstance(value, list) or len(value) != 5:
                raise SchemaError(kpath, "exactly 5 points required")
            derived[key] = [_parse_point(p, mode, f"{kpath}[{i}]") for i, p in enumerate(value)]
    known = {"schema_version", "mode", "precision_bits", "points", "derived"}
    extra = {k: v for k, v in data.items() if k not in known}
    return ConfigDocument(mode=mode, points=points, derived=derived, extra=extra)


def document_to_dict(doc: ConfigDocument) -> dict:
    bits = None if doc.mode.exact else doc.mode.bits
    out: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "mode": "exact" if doc.mode.exact else "float"}
    if not doc.mode.exact:
        out["precision_bits"] = doc.mode.bits
    out["points"] = [format_point(p, bits) for p in doc.points]
    if doc.derived:
        out["derived"] = {
            key: (format_point(doc.derived[key][0], bits) if key in _SINGLE
                  else [format_point(p, bits) for p in doc.derived[key]])
            for key in DERIVED_KEYS
            if key in doc.derived
        }
    out.update(doc.extra)
    return out


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def emit_config(doc: ConfigDocument) -> str:
    return dumps(document_to_dict(doc))


def parse_config(text: str) -> ConfigDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError("$", f"invalid JSON: {err}") from err
    return document_from_dict(data)


def parse_documents(text: str) -> list[ConfigDocument]:
    """A single document, or a collection ``{"schema_version": "1", "configurations": [...]}``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError("$", f"invalid JSON: {err}") from err
    if isinstance(data, dict) and "configurations" in data:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError("$.schema_version", f"expected {SCHEMA_VERSION!r}")
        configs = data["configurations"]
        if not isinstance(configs, list):
            raise SchemaError("$.configurations", "must be a list")
        return [document_from_dict(c, f"$.configurations[{i}]") for i, c in enumerate(configs)]
    return [document_from_dict(data)]
