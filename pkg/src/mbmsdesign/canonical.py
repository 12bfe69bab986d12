"""Canonical JSON serialization shared by every persisted document.

The rendering rules are the bit-exactness contract for manifests, knowledge
base archives, catalog files and API bodies: object keys sorted by byte
order, two-space indentation, LF newlines, UTF-8 without BOM, decimals with
minimal digits and no exponent, and a final newline.
"""

import json
from decimal import Decimal

Doc = None | bool | int | float | str | list | dict

_SHORT_ESCAPES = {
    '"': '\\"',
    "\\": "\\\\",
    "\b": "\\b",
    "\f": "\\f",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def _encode_string(s: str) -> str:
    out = ['"']
    for ch in s:
        esc = _SHORT_ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def format_decimal(x: float) -> str:
    """Render a float with the fewest digits that round-trip, no exponent."""
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("non-finite decimals cannot be serialized")
    s = repr(x)
    if "e" in s or "E" in s:
        s = format(Decimal(s), "f")
        if "." not in s:
            s += ".0"
    return s


def _encode_scalar(doc) -> str:
    if doc is None:
        return "null"
    if doc is True:
        return "true"
    if doc is False:
        return "false"
    if isinstance(doc, int):
        return str(doc)
    if isinstance(doc, float):
        return format_decimal(doc)
    if isinstance(doc, str):
        return _encode_string(doc)
    raise TypeError(f"not a canonical document value: {type(doc).__name__}")


def _encode(doc, indent: int, out: list) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(doc, dict):
        if not doc:
            out.append("{}")
            return
        keys = sorted(doc)
        out.append("{\n")
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError("canonical object keys must be strings")
            out.append(inner)
            out.append(_encode_string(key))
            out.append(": ")
            _encode(doc[key], indent + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(doc, list):
        if not doc:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(doc):
            out.append(inner)
            _encode(item, indent + 1, out)
            out.append(",\n" if i < len(doc) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_encode_scalar(doc))


def dumps(doc) -> str:
    """Canonical text for a document, final newline included."""
    out: list = []
    _encode(doc, 0, out)
    out.append("\n")
    return "".join(out)


def dumps_compact(doc) -> str:
    """One-line canonical rendering, used for digests and tie-breaking."""
    if isinstance(doc, dict):
        parts = (
            _encode_string(k) + ":" + dumps_compact(doc[k]) for k in sorted(doc)
        )
        return "{" + ",".join(parts) + "}"
    if isinstance(doc, list):
        return "[" + ",".join(dumps_compact(item) for item in doc) + "]"
    return _encode_scalar(doc)


def encode(doc) -> bytes:
    return dumps(doc).encode("utf-8")


def loads(data: bytes | str):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data)
