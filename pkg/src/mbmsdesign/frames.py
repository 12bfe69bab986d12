"""Frames: slot structures with is-a inheritance.

Prototype frames state obligations a scheme must satisfy, pattern frames
describe anti-patterns that trigger recommendations, and instance frames
carry the measured slot values of a concrete scheme. A child slot with the
same name as an ancestor slot replaces it wholesale.
"""

from dataclasses import dataclass, replace

from .canonical import dumps_compact
from .errors import CyclicInheritance, MalformedValue, UnknownFrame
from .facts import Sym, Value, value_from_doc, value_to_doc

VALUE_TYPES = ("symbol", "text", "integer", "decimal", "boolean", "instance-ref")

CONSTRAINT_KINDS = (
    "present",
    "absent",
    "equals",
    "one_of",
    "connected_to",
    "count_range",
)


@dataclass(frozen=True)
class Constraint:
    """One predicate from the closed facet set."""

    kind: str
    value: Value | None = None          # equals
    values: tuple = ()                  # one_of
    unit_kind: Sym | None = None        # connected_to
    lo: int | None = None               # count_range
    hi: int | None = None               # count_range; None is unbounded

    def __post_init__(self):
        if self.kind not in CONSTRAINT_KINDS:
            raise MalformedValue(f"unknown constraint kind: {self.kind!r}")

    def to_doc(self) -> dict:
        doc: dict = {"kind": self.kind}
        if self.kind == "equals":
            doc["value"] = value_to_doc(self.value)
        elif self.kind == "one_of":
            doc["values"] = [value_to_doc(v) for v in self.values]
        elif self.kind == "connected_to":
            doc["unit_kind"] = str(self.unit_kind)
        elif self.kind == "count_range":
            doc["lo"] = self.lo
            doc["hi"] = self.hi
        return doc

    @classmethod
    def from_doc(cls, doc) -> "Constraint":
        kind = doc.get("kind")
        if kind == "equals":
            return cls("equals", value=value_from_doc(doc["value"]))
        if kind == "one_of":
            return cls("one_of", values=tuple(value_from_doc(v) for v in doc["values"]))
        if kind == "connected_to":
            return cls("connected_to", unit_kind=Sym(doc["unit_kind"]))
        if kind == "count_range":
            return cls("count_range", lo=int(doc["lo"]), hi=None if doc["hi"] is None else int(doc["hi"]))
        if kind in ("present", "absent"):
            return cls(kind)
        raise MalformedValue(f"bad constraint document: {doc!r}")

    def describe(self) -> str:
        if self.kind == "equals":
            return f"equals {dumps_compact(value_to_doc(self.value))}"
        if self.kind == "one_of":
            return "one of " + ", ".join(dumps_compact(value_to_doc(v)) for v in self.values)
        if self.kind == "connected_to":
            return f"connected to {self.unit_kind}"
        if self.kind == "count_range":
            hi = "unbounded" if self.hi is None else str(self.hi)
            return f"count in [{self.lo}, {hi}]"
        return self.kind


@dataclass(frozen=True)
class Slot:
    name: Sym
    value_type: str = "symbol"
    cardinality: tuple = (1, 1)          # (min, max); max None is unbounded
    required: bool = False
    default: Value | None = None
    constraint: Constraint | None = None

    def __post_init__(self):
        if self.value_type not in VALUE_TYPES:
            raise MalformedValue(f"unknown slot value type: {self.value_type!r}")
        lo, hi = self.cardinality
        if lo < 0 or (hi is not None and lo > hi):
            raise MalformedValue(f"bad cardinality on slot {self.name}: {self.cardinality}")
        if self.required and lo < 1:
            raise MalformedValue(f"required slot {self.name} needs min cardinality >= 1")

    def to_doc(self) -> dict:
        return {
            "name": str(self.name),
            "value_type": self.value_type,
            "cardinality": [self.cardinality[0], self.cardinality[1]],
            "required": self.required,
            "default": None if self.default is None else value_to_doc(self.default),
            "constraint": None if self.constraint is None else self.constraint.to_doc(),
        }

    @classmethod
    def from_doc(cls, doc) -> "Slot":
        card = doc.get("cardinality", [1, 1])
        return cls(
            name=Sym(doc["name"]),
            value_type=doc.get("value_type", "symbol"),
            cardinality=(int(card[0]), None if card[1] is None else int(card[1])),
            required=bool(doc.get("required", False)),
            default=None if doc.get("default") is None else value_from_doc(doc["default"]),
            constraint=None
            if doc.get("constraint") is None
            else Constraint.from_doc(doc["constraint"]),
        )


FRAME_KINDS = ("prototype", "pattern", "instance")


@dataclass(frozen=True)
class Frame:
    name: Sym
    kind: str
    isa: Sym | None = None
    slots: tuple = ()
    values: tuple = ()        # ((slot name, Value), ...) for instance frames
    message: str | None = None

    def __post_init__(self):
        if self.kind not in FRAME_KINDS:
            raise MalformedValue(f"unknown frame kind: {self.kind!r}")
        if self.message is not None and self.kind != "pattern":
            raise MalformedValue("only pattern frames carry a message")
        names = [s.name for s in self.slots]
        if len(names) != len(set(names)):
            raise MalformedValue(f"duplicate slot names in frame {self.name}")

    def slot(self, name: Sym) -> Slot | None:
        for s in self.slots:
            if s.name == name:
                return s
        return None

    def value_map(self) -> dict:
        return dict(self.values)

    def to_doc(self) -> dict:
        return {
            "name": str(self.name),
            "kind": self.kind,
            "isa": None if self.isa is None else str(self.isa),
            "slots": [s.to_doc() for s in self.slots],
            "values": {str(n): value_to_doc(v) for n, v in self.values},
            "message": self.message,
        }

    @classmethod
    def from_doc(cls, doc) -> "Frame":
        return cls(
            name=Sym(doc["name"]),
            kind=doc["kind"],
            isa=None if doc.get("isa") is None else Sym(doc["isa"]),
            slots=tuple(Slot.from_doc(s) for s in doc.get("slots", [])),
            values=tuple(
                sorted(
                    (Sym(n), value_from_doc(v))
                    for n, v in doc.get("values", {}).items()
                )
            ),
            message=doc.get("message"),
        )


def inheritance_chain(frames: dict, name: Sym) -> list:
    """Frames from root ancestor down to the named frame."""
    chain = []
    seen = []
    current: Sym | None = name
    while current is not None:
        if current in seen:
            cycle = seen[seen.index(current):] + [current]
            raise CyclicInheritance([str(c) for c in cycle])
        frame = frames.get(current)
        if frame is None:
            raise UnknownFrame(f"frame {current} is not in the knowledge base")
        seen.append(current)
        chain.append(frame)
        current = frame.isa
    chain.reverse()
    return chain


def resolve_frame(frames: dict, name: Sym) -> Frame:
    """Flatten the is-a chain: child slots and values override wholesale.

    The result carries the named frame's kind and message and no isa link,
    so resolving a resolved frame is the identity.
    """
    chain = inheritance_chain(frames, name)
    leaf = chain[-1]
    merged_slots: dict = {}
    merged_values: dict = {}
    for frame in chain:
        for s in frame.slots:
            merged_slots[s.name] = s
        for n, v in frame.values:
            merged_values[n] = v
    return replace(
        leaf,
        isa=None,
        slots=tuple(merged_slots.values()),
        values=tuple(sorted(merged_values.items())),
    )
