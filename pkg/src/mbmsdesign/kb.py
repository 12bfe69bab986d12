"""Production rules and the knowledge base.

A KnowledgeBase is immutable; every successful edit returns a new value
with the version counter bumped, so concurrent readers can safely keep the
snapshot they started with.
"""

import os
import tempfile
from dataclasses import dataclass, replace

from . import canonical
from .actions import (
    AssertFact,
    Connect,
    InstantiateUnit,
    RetractFact,
    SetParam,
    action_from_doc,
    mentioned_symbols,
    read_variables,
)
from .errors import (
    ArchiveFormatError,
    DuplicateRuleId,
    EmptySelection,
    MalformedRule,
    MalformedValue,
    UnboundActionVariable,
    UnknownFrame,
    UnknownRule,
    UnknownUnit,
)
from .facts import Pattern, Sym
from .frames import Frame, inheritance_chain


@dataclass(frozen=True)
class ProductionRule:
    id: Sym
    salience: int
    conditions: tuple
    actions: tuple
    linked_units: frozenset = frozenset()
    doc: str = ""

    def to_doc(self) -> dict:
        return {
            "id": str(self.id),
            "salience": self.salience,
            "conditions": [c.to_doc() for c in self.conditions],
            "actions": [a.to_doc() for a in self.actions],
            "linked_units": sorted(str(u) for u in self.linked_units),
            "doc": self.doc,
        }

    @classmethod
    def from_doc(cls, doc) -> "ProductionRule":
        try:
            rule = cls(
                id=Sym(doc["id"]),
                salience=int(doc["salience"]),
                conditions=tuple(Pattern.from_doc(c) for c in doc["conditions"]),
                actions=tuple(action_from_doc(a) for a in doc["actions"]),
                linked_units=frozenset(Sym(u) for u in doc.get("linked_units", [])),
                doc=str(doc.get("doc", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRule(f"bad rule document: {exc}") from exc
        validate_rule(rule)
        return rule

    def mentions(self, symbol: Sym) -> bool:
        """True when a condition or action carries the literal symbol."""
        for cond in self.conditions:
            if any(isinstance(t, Sym) and t == symbol for t in cond.terms()):
                return True
        return any(symbol in mentioned_symbols(a) for a in self.actions)


def validate_rule(rule: ProductionRule) -> None:
    """Check structural invariants and the action-variable closure."""
    if not isinstance(rule.salience, int) or isinstance(rule.salience, bool):
        raise MalformedRule(f"rule {rule.id}: salience must be an integer")
    positives = [c for c in rule.conditions if not c.negated]
    if not positives:
        raise MalformedRule(f"rule {rule.id}: needs at least one non-negated condition")
    bound = set()
    for cond in positives:
        bound |= cond.variables()
    for action in rule.actions:
        for name in sorted(read_variables(action)):
            if name not in bound:
                raise UnboundActionVariable(name)
        if isinstance(action, InstantiateUnit):
            if action.as_var.name in bound:
                raise MalformedRule(
                    f"rule {rule.id}: instance variable ?{action.as_var.name} "
                    "shadows a condition variable"
                )
            bound.add(action.as_var.name)


@dataclass(frozen=True)
class KnowledgeBase:
    rules: tuple = ()
    frames: tuple = ()
    version: int = 0
    meta: tuple = ()    # ((key, value), ...) text annotations

    def rule(self, rule_id: Sym) -> ProductionRule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise UnknownRule(f"rule {rule_id} is not in the knowledge base")

    def has_rule(self, rule_id: Sym) -> bool:
        return any(r.id == rule_id for r in self.rules)

    def frame_map(self) -> dict:
        return {f.name: f for f in self.frames}

    def frame(self, name: Sym) -> Frame:
        for f in self.frames:
            if f.name == name:
                return f
        raise UnknownFrame(f"frame {name} is not in the knowledge base")

    def meta_map(self) -> dict:
        return dict(self.meta)

    def to_doc(self) -> dict:
        return {
            "version": self.version,
            "meta": {str(k): str(v) for k, v in self.meta},
            "rules": [r.to_doc() for r in self.rules],
            "frames": [f.to_doc() for f in self.frames],
        }


def kb_from_doc(doc, catalog=None) -> KnowledgeBase:
    """Build and validate a KnowledgeBase from its document form.

    When a catalog is given, every linked unit must exist in it.
    """
    if not isinstance(doc, dict):
        raise ArchiveFormatError("knowledge base document must be an object")
    try:
        rules = tuple(ProductionRule.from_doc(r) for r in doc.get("rules", []))
        frames = tuple(Frame.from_doc(f) for f in doc.get("frames", []))
        version = int(doc.get("version", 0))
        meta = tuple(sorted((str(k), str(v)) for k, v in doc.get("meta", {}).items()))
    except (MalformedValue, MalformedRule, UnboundActionVariable):
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ArchiveFormatError(f"bad knowledge base document: {exc}") from exc
    kb = KnowledgeBase(rules=rules, frames=frames, version=version, meta=meta)
    _validate_kb(kb, catalog)
    return kb


def _validate_kb(kb: KnowledgeBase, catalog=None) -> None:
    rule_ids = [r.id for r in kb.rules]
    if len(rule_ids) != len(set(rule_ids)):
        dupes = sorted({r for r in rule_ids if rule_ids.count(r) > 1})
        raise DuplicateRuleId(f"duplicate rule ids: {', '.join(dupes)}")
    frame_names = [f.name for f in kb.frames]
    if len(frame_names) != len(set(frame_names)):
        raise ArchiveFormatError("duplicate frame names in knowledge base")
    frame_map = kb.frame_map()
    for f in kb.frames:
        inheritance_chain(frame_map, f.name)   # raises on cycles or gaps
    if catalog is not None:
        for r in kb.rules:
            for unit_id in sorted(r.linked_units):
                if not catalog.has_unit(unit_id):
                    raise UnknownUnit(str(unit_id))


def add_rule(kb: KnowledgeBase, rule: ProductionRule) -> KnowledgeBase:
    """Append a rule, validating uniqueness and the variable closure."""
    validate_rule(rule)
    if kb.has_rule(rule.id):
        raise DuplicateRuleId(f"rule id {rule.id} already present")
    return replace(kb, rules=kb.rules + (rule,), version=kb.version + 1)


def link_rule_to_units(
    kb: KnowledgeBase, rule_id: Sym, unit_ids, catalog
) -> KnowledgeBase:
    """Union new unit links into a rule; every unit must be cataloged."""
    rule = kb.rule(rule_id)
    unit_ids = frozenset(Sym(u) for u in unit_ids)
    for unit_id in sorted(unit_ids):
        if not catalog.has_unit(unit_id):
            raise UnknownUnit(str(unit_id))
    updated = replace(rule, linked_units=rule.linked_units | unit_ids)
    rules = tuple(updated if r.id == rule_id else r for r in kb.rules)
    return replace(kb, rules=rules, version=kb.version + 1)


def _validator_frames(kb: KnowledgeBase) -> list:
    """Prototype and pattern frames plus everything on their is-a chains."""
    frame_map = kb.frame_map()
    keep = set()
    for f in kb.frames:
        if f.kind in ("prototype", "pattern"):
            for ancestor in inheritance_chain(frame_map, f.name):
                keep.add(ancestor.name)
    return [f for f in kb.frames if f.name in keep]


def export_subset(
    kb: KnowledgeBase,
    rule_ids=None,
    capabilities=None,
    select_all: bool = False,
) -> bytes:
    """Archive a knowledge base subset.

    Rules are selected by id or by literal mention of a capability symbol in
    their conditions or actions. Frames used by the validator travel along
    with their full is-a chains, and the version is preserved so work built
    on the subset lines up with the parent knowledge base.
    """
    if select_all:
        selected = list(kb.rules)
    else:
        wanted_ids = {Sym(r) for r in (rule_ids or ())}
        wanted_caps = {Sym(c) for c in (capabilities or ())}
        selected = [
            r
            for r in kb.rules
            if r.id in wanted_ids or any(r.mentions(c) for c in wanted_caps)
        ]
    if not selected:
        raise EmptySelection("selector matched no rules")
    subset = KnowledgeBase(
        rules=tuple(selected),
        frames=tuple(_validator_frames(kb)),
        version=kb.version,
        meta=kb.meta,
    )
    return canonical.encode(subset.to_doc())


def save_kb(kb: KnowledgeBase, path: str) -> None:
    """Write the archive atomically: temp file in place, then rename."""
    data = canonical.encode(kb.to_doc())
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".kb-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_kb(data: bytes | str, catalog=None) -> KnowledgeBase:
    try:
        doc = canonical.loads(data)
    except ValueError as exc:
        raise ArchiveFormatError(f"knowledge base archive is not valid JSON: {exc}") from exc
    return kb_from_doc(doc, catalog)


def load_kb_file(path: str, catalog=None) -> KnowledgeBase:
    with open(path, "rb") as fh:
        return load_kb(fh.read(), catalog)


def kb_warnings(kb: KnowledgeBase) -> list:
    """Lint notes for knowledge engineers; nothing here blocks loading."""
    notes = []
    for f in kb.frames:
        if f.kind == "pattern" and not f.slots:
            notes.append(
                f"pattern frame {f.name} has no slots and will match every scheme"
            )
    for r in kb.rules:
        if not any(isinstance(a, (AssertFact, RetractFact, InstantiateUnit, Connect, SetParam)) for a in r.actions):
            notes.append(f"rule {r.id} has no effect on memory or scheme")
    return notes
