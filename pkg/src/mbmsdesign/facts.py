"""Ground values, facts and condition patterns.

Working memory holds entity-attribute-value triples whose positions are all
ground. Patterns are the same triples with variables allowed in any
position; a negated pattern is satisfied when nothing in working memory
matches it.
"""

import re
from dataclasses import dataclass

from .canonical import dumps_compact, format_decimal
from .errors import MalformedValue

_SYMBOL_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class Sym(str):
    """Interned lowercase identifier, distinct from free text."""

    __slots__ = ()

    def __new__(cls, value: str):
        if not _SYMBOL_RE.match(value):
            raise MalformedValue(f"not a symbol: {value!r}")
        return str.__new__(cls, value)

    def __repr__(self) -> str:
        return f"Sym({str.__repr__(self)})"


# One of Sym, text, int, float (decimal) or bool. Note that bool is checked
# before int and Sym before str wherever the distinction matters.
Value = Sym | str | int | float | bool


@dataclass(frozen=True)
class Var:
    """A pattern variable, written ?name in surface syntax."""

    name: str

    def __post_init__(self):
        if not _SYMBOL_RE.match(self.name):
            raise MalformedValue(f"not a variable name: {self.name!r}")


Term = Var | Value


def is_value(x) -> bool:
    return isinstance(x, (bool, int, float, str))


def values_equal(a: Value, b: Value) -> bool:
    """Type-faithful equality: Sym('a') != 'a', 3 != 3.0, True != 1."""
    return type(a) is type(b) and a == b


def _value_tag(v: Value) -> str:
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, Sym):
        return "symbol"
    if isinstance(v, str):
        return "text"
    if isinstance(v, int):
        return "integer"
    if isinstance(v, float):
        return "decimal"
    raise MalformedValue(f"not a value: {v!r}")


def value_to_doc(v: Value):
    """Document form: symbols are tagged objects, the rest native JSON."""
    if isinstance(v, Sym):
        return {"symbol": str(v)}
    if is_value(v):
        _value_tag(v)
        return v
    raise MalformedValue(f"not a value: {v!r}")


def value_from_doc(doc) -> Value:
    if isinstance(doc, dict):
        if set(doc) == {"symbol"}:
            return Sym(doc["symbol"])
        raise MalformedValue(f"bad value document: {doc!r}")
    if isinstance(doc, (bool, int, float, str)):
        return doc
    raise MalformedValue(f"bad value document: {doc!r}")


def term_to_doc(t: Term):
    if isinstance(t, Var):
        return {"var": t.name}
    return value_to_doc(t)


def term_from_doc(doc) -> Term:
    if isinstance(doc, dict) and set(doc) == {"var"}:
        return Var(doc["var"])
    return value_from_doc(doc)


def render_value(v: Value) -> str:
    """Human-readable scalar rendering shared by stubs and traces."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Sym):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, float):
        return format_decimal(v)
    return str(v)


def value_sort_key(v: Value) -> str:
    return dumps_compact(value_to_doc(v))


class Fact:
    """A ground entity-attribute-value triple."""

    __slots__ = ("entity", "attribute", "value")

    def __init__(self, entity: Sym, attribute: Sym, value: Value):
        if not isinstance(entity, Sym):
            entity = Sym(entity)
        if not isinstance(attribute, Sym):
            attribute = Sym(attribute)
        if isinstance(value, Var) or not is_value(value):
            raise MalformedValue(f"fact value must be ground: {value!r}")
        object.__setattr__(self, "entity", entity)
        object.__setattr__(self, "attribute", attribute)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Fact is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Fact)
            and self.entity == other.entity
            and self.attribute == other.attribute
            and values_equal(self.value, other.value)
        )

    def __hash__(self):
        return hash(
            (self.entity, self.attribute, _value_tag(self.value), self.value)
        )

    def __repr__(self):
        return f"Fact({self.entity}, {self.attribute}, {self.value!r})"

    def to_doc(self) -> list:
        return [str(self.entity), str(self.attribute), value_to_doc(self.value)]

    @classmethod
    def from_doc(cls, doc) -> "Fact":
        if not isinstance(doc, list) or len(doc) != 3:
            raise MalformedValue(f"bad fact document: {doc!r}")
        return cls(Sym(doc[0]), Sym(doc[1]), value_from_doc(doc[2]))

    def sort_key(self) -> str:
        return dumps_compact(self.to_doc())


@dataclass(frozen=True)
class Pattern:
    """A fact template with variables; negated patterns assert absence."""

    entity: Term
    attribute: Term
    value: Term
    negated: bool = False

    def terms(self) -> tuple:
        return (self.entity, self.attribute, self.value)

    def variables(self) -> set:
        return {t.name for t in self.terms() if isinstance(t, Var)}

    def to_doc(self) -> dict:
        return {
            "entity": term_to_doc(self.entity),
            "attribute": term_to_doc(self.attribute),
            "value": term_to_doc(self.value),
            "negated": self.negated,
        }

    @classmethod
    def from_doc(cls, doc) -> "Pattern":
        try:
            return cls(
                entity=term_from_doc(doc["entity"]),
                attribute=term_from_doc(doc["attribute"]),
                value=term_from_doc(doc["value"]),
                negated=bool(doc.get("negated", False)),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedValue(f"bad pattern document: {doc!r}") from exc


# A variable assignment produced by matching. Treated as immutable: matching
# always copies before extending.
Bindings = dict[str, Value]


def bindings_to_doc(b: Bindings) -> dict:
    return {name: value_to_doc(v) for name, v in b.items()}


def bindings_digest(b: Bindings) -> str:
    return dumps_compact(bindings_to_doc(b))
