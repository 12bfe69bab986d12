"""Rule action types.

Actions on the right-hand side of a production rule either mutate working
memory (assert/retract), grow the unit scheme (instantiate/connect/set
param), or steer the session (request next requirement, halt). A variable
read by an action must be bound by a non-negated condition or introduced by
an earlier InstantiateUnit in the same rule.
"""

from dataclasses import dataclass

from .errors import MalformedValue
from .facts import Sym, Term, Var, term_from_doc, term_to_doc


@dataclass(frozen=True)
class AssertFact:
    entity: Term
    attribute: Term
    value: Term

    def to_doc(self) -> dict:
        return {
            "op": "assert",
            "entity": term_to_doc(self.entity),
            "attribute": term_to_doc(self.attribute),
            "value": term_to_doc(self.value),
        }


@dataclass(frozen=True)
class RetractFact:
    entity: Term
    attribute: Term
    value: Term

    def to_doc(self) -> dict:
        return {
            "op": "retract",
            "entity": term_to_doc(self.entity),
            "attribute": term_to_doc(self.attribute),
            "value": term_to_doc(self.value),
        }


@dataclass(frozen=True)
class InstantiateUnit:
    unit_id: Sym
    as_var: Var

    def to_doc(self) -> dict:
        return {
            "op": "instantiate",
            "unit": str(self.unit_id),
            "as": self.as_var.name,
        }


@dataclass(frozen=True)
class Connect:
    from_instance: Term
    from_port: Sym
    to_instance: Term
    to_port: Sym

    def to_doc(self) -> dict:
        return {
            "op": "connect",
            "from": term_to_doc(self.from_instance),
            "from_port": str(self.from_port),
            "to": term_to_doc(self.to_instance),
            "to_port": str(self.to_port),
        }


@dataclass(frozen=True)
class SetParam:
    instance: Term
    slot: Sym
    value: Term

    def to_doc(self) -> dict:
        return {
            "op": "set_param",
            "instance": term_to_doc(self.instance),
            "slot": str(self.slot),
            "value": term_to_doc(self.value),
        }


@dataclass(frozen=True)
class RequestNextRequirement:
    def to_doc(self) -> dict:
        return {"op": "request_next"}


@dataclass(frozen=True)
class Halt:
    def to_doc(self) -> dict:
        return {"op": "halt"}


Action = (
    AssertFact
    | RetractFact
    | InstantiateUnit
    | Connect
    | SetParam
    | RequestNextRequirement
    | Halt
)


def action_from_doc(doc) -> Action:
    if not isinstance(doc, dict) or "op" not in doc:
        raise MalformedValue(f"bad action document: {doc!r}")
    op = doc["op"]
    try:
        if op == "assert":
            return AssertFact(
                term_from_doc(doc["entity"]),
                term_from_doc(doc["attribute"]),
                term_from_doc(doc["value"]),
            )
        if op == "retract":
            return RetractFact(
                term_from_doc(doc["entity"]),
                term_from_doc(doc["attribute"]),
                term_from_doc(doc["value"]),
            )
        if op == "instantiate":
            return InstantiateUnit(Sym(doc["unit"]), Var(doc["as"]))
        if op == "connect":
            return Connect(
                term_from_doc(doc["from"]),
                Sym(doc["from_port"]),
                term_from_doc(doc["to"]),
                Sym(doc["to_port"]),
            )
        if op == "set_param":
            return SetParam(
                term_from_doc(doc["instance"]),
                Sym(doc["slot"]),
                term_from_doc(doc["value"]),
            )
        if op == "request_next":
            return RequestNextRequirement()
        if op == "halt":
            return Halt()
    except KeyError as exc:
        raise MalformedValue(f"bad action document: {doc!r}") from exc
    raise MalformedValue(f"unknown action op: {op!r}")


def read_variables(action: Action) -> set:
    """Variables an action reads (InstantiateUnit's target is a write)."""
    if isinstance(action, (AssertFact, RetractFact)):
        terms = (action.entity, action.attribute, action.value)
    elif isinstance(action, Connect):
        terms = (action.from_instance, action.to_instance)
    elif isinstance(action, SetParam):
        terms = (action.instance, action.value)
    else:
        terms = ()
    return {t.name for t in terms if isinstance(t, Var)}


def mentioned_symbols(action: Action) -> set:
    """Every literal symbol an action mentions, for subset selection."""
    out: set = set()
    if isinstance(action, (AssertFact, RetractFact)):
        terms = (action.entity, action.attribute, action.value)
    elif isinstance(action, InstantiateUnit):
        return {action.unit_id}
    elif isinstance(action, Connect):
        terms = (action.from_instance, action.from_port, action.to_instance, action.to_port)
    elif isinstance(action, SetParam):
        terms = (action.instance, action.slot, action.value)
    else:
        return out
    for t in terms:
        if isinstance(t, Sym):
            out.add(t)
    return out
