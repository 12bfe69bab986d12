"""Scheme analysis by frame comparison.

The current scheme is measured into an instance frame (unit-kind counts,
connection-pair counts, one slot per instance param value). Prototype
frames state obligations: a violated facet becomes a Mistake. Pattern
frames describe anti-patterns: when every facet of a pattern holds on the
instance frame, its message is surfaced as a Recommendation.
"""

from dataclasses import dataclass

from .catalog import UNIT_KINDS, Catalog
from .engine import SchemeGraph
from .errors import KindMismatch
from .facts import Sym, values_equal
from .frames import Constraint, Frame, Slot, resolve_frame
from .kb import KnowledgeBase

INSTANCE_FRAME_NAME = Sym("current_scheme")


def _count_slot(kind: str) -> Sym:
    return Sym(f"{kind}_count")


def _conn_slot(kind_a: str, kind_b: str) -> Sym:
    lo, hi = sorted((kind_a, kind_b))
    return Sym(f"conn_{lo}__{hi}")


def scheme_to_frame(scheme: SchemeGraph, catalog: Catalog) -> Frame:
    """Measure a scheme into an instance frame with deterministic slots."""
    values: dict = {}
    for kind in UNIT_KINDS:
        values[_count_slot(kind)] = 0
    for i, kind_a in enumerate(UNIT_KINDS):
        for kind_b in UNIT_KINDS[i:]:
            values[_conn_slot(kind_a, kind_b)] = 0
    kind_of = {}
    for inst in scheme.instances:
        kind = catalog.unit(inst.unit_id).kind
        kind_of[inst.instance_id] = kind
        values[_count_slot(kind)] += 1
        for slot_name, value in inst.params:
            values[Sym(f"param_{inst.instance_id}_{slot_name}")] = value
    for conn in scheme.connections:
        slot = _conn_slot(kind_of[conn.from_instance], kind_of[conn.to_instance])
        values[slot] += 1
    return Frame(
        name=INSTANCE_FRAME_NAME,
        kind="instance",
        values=tuple(sorted(values.items())),
    )


def _evaluate(constraint: Constraint, slot_name: Sym, values: dict) -> bool:
    present = slot_name in values
    value = values.get(slot_name)
    if constraint.kind == "present":
        return present
    if constraint.kind == "absent":
        return not present
    if constraint.kind == "equals":
        return present and values_equal(value, constraint.value)
    if constraint.kind == "one_of":
        return present and any(values_equal(value, v) for v in constraint.values)
    if constraint.kind == "count_range":
        if not present or isinstance(value, bool) or not isinstance(value, int):
            return False
        if value < constraint.lo:
            return False
        return constraint.hi is None or value <= constraint.hi
    if constraint.kind == "connected_to":
        name = str(slot_name)
        if not name.endswith("_count"):
            return False
        kind = name[: -len("_count")]
        if values.get(slot_name, 0) == 0:
            return True
        return values.get(_conn_slot(kind, str(constraint.unit_kind)), 0) > 0
    return False


@dataclass(frozen=True)
class Mistake:
    code: str
    subject: Sym
    source_frame: Sym
    message: str

    def to_doc(self) -> dict:
        return {
            "code": self.code,
            "subject": str(self.subject),
            "source_frame": str(self.source_frame),
            "message": self.message,
        }


@dataclass(frozen=True)
class Recommendation:
    source_frame: Sym
    message: str
    subjects: tuple = ()

    def to_doc(self) -> dict:
        return {
            "source_frame": str(self.source_frame),
            "message": self.message,
            "subjects": [str(s) for s in self.subjects],
        }


@dataclass(frozen=True)
class ValidationReport:
    mistakes: tuple
    recommendations: tuple
    checked_against: tuple

    @property
    def passed(self) -> bool:
        return not self.mistakes

    def to_doc(self) -> dict:
        return {
            "passed": self.passed,
            "mistakes": [m.to_doc() for m in self.mistakes],
            "recommendations": [r.to_doc() for r in self.recommendations],
            "checked_against": [str(f) for f in self.checked_against],
        }


def _is_unit_count(slot_name: Sym) -> bool:
    name = str(slot_name)
    return name.endswith("_count") and name[: -len("_count")] in UNIT_KINDS


def _check_slot(slot: Slot, frame_name: Sym, values: dict) -> Mistake | None:
    value = values.get(slot.name)
    is_count = _is_unit_count(slot.name)
    is_conn = str(slot.name).startswith("conn_")
    if slot.required:
        missing = value is None or ((is_count or is_conn) and value == 0)
        if missing:
            if is_count:
                kind = str(slot.name)[: -len("_count")]
                return Mistake(
                    "MISSING_REQUIRED_UNIT", slot.name, frame_name,
                    f"the scheme needs at least one {kind} unit",
                )
            if is_conn:
                return Mistake(
                    "MISSING_CONNECTION", slot.name, frame_name,
                    f"the scheme is missing a {slot.name} connection",
                )
            return Mistake(
                "CONSTRAINT_VIOLATION", slot.name, frame_name,
                f"required slot {slot.name} has no value",
            )
    if (is_count or is_conn) and isinstance(value, int) and value > 0:
        lo, hi = slot.cardinality
        if value < lo or (hi is not None and value > hi):
            bound = "unbounded" if hi is None else str(hi)
            return Mistake(
                "CARDINALITY_VIOLATION", slot.name, frame_name,
                f"{slot.name} is {value}, allowed range is [{lo}, {bound}]",
            )
    if slot.constraint is not None and not _evaluate(slot.constraint, slot.name, values):
        return Mistake(
            "CONSTRAINT_VIOLATION", slot.name, frame_name,
            f"{slot.name} fails constraint: {slot.constraint.describe()}",
        )
    return None


def match_pattern_frame(instance: Frame, pattern: Frame) -> Recommendation | None:
    """A recommendation when every facet of an anti-pattern frame holds."""
    if pattern.kind != "pattern":
        raise KindMismatch(f"frame {pattern.name} is not a pattern frame")
    if instance.kind != "instance":
        raise KindMismatch(f"frame {instance.name} is not an instance frame")
    values = instance.value_map()
    for slot in pattern.slots:
        if slot.constraint is not None and not _evaluate(slot.constraint, slot.name, values):
            return None
    return Recommendation(
        source_frame=pattern.name,
        message=pattern.message or f"pattern {pattern.name} applies",
    )


def _pattern_subjects(pattern: Frame, scheme: SchemeGraph, catalog: Catalog) -> tuple:
    kinds = set()
    for slot in pattern.slots:
        if _is_unit_count(slot.name):
            kinds.add(str(slot.name)[: -len("_count")])
    return tuple(
        inst.instance_id
        for inst in scheme.instances
        if catalog.unit(inst.unit_id).kind in kinds
    )


def validate(scheme: SchemeGraph, kb: KnowledgeBase, catalog: Catalog) -> ValidationReport:
    """Check a scheme against every prototype and pattern frame in the KB.

    A malformed frame hierarchy raises instead of reporting: that is a
    failed validation run, not a scheme mistake.
    """
    instance = scheme_to_frame(scheme, catalog)
    values = instance.value_map()
    frame_map = kb.frame_map()
    mistakes = []
    recommendations = []
    checked = []
    for frame in sorted(kb.frames, key=lambda f: f.name):
        if frame.kind == "prototype":
            resolved = resolve_frame(frame_map, frame.name)
            checked.append(frame.name)
            for slot in sorted(resolved.slots, key=lambda s: s.name):
                mistake = _check_slot(slot, frame.name, values)
                if mistake is not None:
                    mistakes.append(mistake)
        elif frame.kind == "pattern":
            resolved = resolve_frame(frame_map, frame.name)
            checked.append(frame.name)
            hit = match_pattern_frame(instance, resolved)
            if hit is not None:
                recommendations.append(
                    Recommendation(
                        source_frame=frame.name,
                        message=hit.message,
                        subjects=_pattern_subjects(resolved, scheme, catalog),
                    )
                )
    return ValidationReport(
        mistakes=tuple(mistakes),
        recommendations=tuple(recommendations),
        checked_against=tuple(checked),
    )
