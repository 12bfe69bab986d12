"""Forward-chaining synthesis sessions.

A session consumes formalized requirements one at a time. Each submission
asserts the requirement's facts and runs the rule engine to a fixpoint:
build the agenda of satisfiable rule activations, pick one by conflict
resolution, apply its actions atomically, and repeat until the agenda is
empty or a halt fires. A requirement counts as processed once some rule
asserts (reqId, status, consumed); if nothing does, the session reports
that requirement-processing rules are missing and waits for the knowledge
base to be extended.

A rule/bindings pair never fires twice in one session, so any rule set
terminates unless it keeps inventing new unit instances; a hard ceiling of
10000 firings per submission turns such runaways into a failed session
instead of a hang.
"""

from dataclasses import dataclass, replace

from .actions import (
    AssertFact,
    Connect,
    Halt,
    InstantiateUnit,
    RequestNextRequirement,
    RetractFact,
    SetParam,
)
from .catalog import Catalog, check_compatibility
from .errors import (
    EngineFailure,
    IncompatibleConnection,
    MalformedValue,
    ProtectedFact,
    RunawayRuleSet,
    SessionNotAwaiting,
    SessionNotDescribable,
    UnknownInstanceInAction,
    UnknownParamSlot,
    UnknownPortInAction,
    UnknownUnitInAction,
    MalformedRequirement,
)
from .facts import (
    Bindings,
    Fact,
    Sym,
    Value,
    Var,
    bindings_digest,
    value_from_doc,
    value_to_doc,
)
from .kb import KnowledgeBase, ProductionRule
from .matching import match_with_support
from .reqdsl import FormalRequirement

FIRING_CEILING = 10000

INSTANCE_OF = Sym("instance_of")
STATUS = Sym("status")
CONSUMED = Sym("consumed")
DONE = Sym("done")


@dataclass(frozen=True)
class Connection:
    from_instance: Sym
    from_port: Sym
    to_instance: Sym
    to_port: Sym

    def to_doc(self) -> dict:
        return {
            "from": str(self.from_instance),
            "from_port": str(self.from_port),
            "to": str(self.to_instance),
            "to_port": str(self.to_port),
        }

    @classmethod
    def from_doc(cls, doc) -> "Connection":
        return cls(
            Sym(doc["from"]), Sym(doc["from_port"]),
            Sym(doc["to"]), Sym(doc["to_port"]),
        )


@dataclass(frozen=True)
class UnitInstance:
    instance_id: Sym
    unit_id: Sym
    params: tuple = ()      # ((slot, Value), ...) sorted by slot

    def param_map(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class SchemeGraph:
    instances: tuple = ()
    connections: tuple = ()

    def instance(self, instance_id: Sym) -> UnitInstance | None:
        for inst in self.instances:
            if inst.instance_id == instance_id:
                return inst
        return None

    def validate(self, catalog: Catalog) -> None:
        seen = set()
        for inst in self.instances:
            if inst.instance_id in seen:
                raise MalformedValue(f"duplicate instance id {inst.instance_id}")
            seen.add(inst.instance_id)
            unit = catalog.unit(inst.unit_id)
            for slot_name, _ in inst.params:
                if unit.param_slot(slot_name) is None:
                    raise UnknownParamSlot(
                        f"{inst.instance_id} has no param slot {slot_name}"
                    )
        conn_seen = set()
        for c in self.connections:
            if c in conn_seen:
                raise MalformedValue("duplicate connection record")
            conn_seen.add(c)
            for end, port_name in ((c.from_instance, c.from_port), (c.to_instance, c.to_port)):
                inst = self.instance(end)
                if inst is None:
                    raise UnknownInstanceInAction(f"connection endpoint {end} missing")
                if catalog.unit(inst.unit_id).port(port_name) is None:
                    raise UnknownPortInAction(f"no port {port_name} on {end}")
            a = catalog.unit(self.instance(c.from_instance).unit_id).port(c.from_port)
            b = catalog.unit(self.instance(c.to_instance).unit_id).port(c.to_port)
            if not check_compatibility(a, b):
                raise IncompatibleConnection(
                    f"{c.from_instance}.{c.from_port} is not compatible with "
                    f"{c.to_instance}.{c.to_port}"
                )


@dataclass(frozen=True)
class Firing:
    seq: int
    rule_id: Sym
    bindings: tuple          # ((name, Value), ...) sorted
    actions_applied: tuple   # ground action documents

    def to_doc(self) -> dict:
        return {
            "seq": self.seq,
            "rule": str(self.rule_id),
            "bindings": {n: value_to_doc(v) for n, v in self.bindings},
            "actions": list(self.actions_applied),
        }


@dataclass(frozen=True)
class Status:
    state: str                       # awaiting_requirement | missing_rule | halted | failed
    requirement: Sym | None = None   # set for missing_rule
    error: tuple = ()                # ((key, value), ...) for failed

    @classmethod
    def awaiting(cls) -> "Status":
        return cls("awaiting_requirement")

    @classmethod
    def missing_rule(cls, req_id: Sym) -> "Status":
        return cls("missing_rule", requirement=req_id)

    @classmethod
    def halted(cls) -> "Status":
        return cls("halted")

    @classmethod
    def failed(cls, err: EngineFailure) -> "Status":
        return cls("failed", error=tuple(sorted(err.to_doc().items())))

    def to_doc(self) -> dict:
        doc: dict = {"status": self.state}
        if self.requirement is not None:
            doc["requirement"] = str(self.requirement)
        if self.error:
            doc["error"] = dict(self.error)
        return doc


@dataclass(frozen=True)
class Activation:
    """One agenda entry: a rule plus one consistent set of bindings."""

    rule: ProductionRule
    bindings: Bindings
    recency: int
    digest: str

    def sort_key(self) -> tuple:
        return (
            -self.rule.salience,
            -len(self.rule.conditions),
            -self.recency,
            str(self.rule.id),
            self.digest,
        )


def conflict_resolve(agenda) -> Activation:
    """Pick the unique maximum activation.

    Order: salience, then condition count (specificity), then the highest
    assertion seq among matched facts (recency), then rule id, then the
    canonical rendering of the bindings.
    """
    if not agenda:
        raise MalformedValue("conflict resolution needs a nonempty agenda")
    return min(agenda, key=Activation.sort_key)


class Session:
    """Single-threaded state machine for one design conversation."""

    def __init__(self, kb: KnowledgeBase, catalog: Catalog, session_id: str = "local"):
        self.session_id = session_id
        self.kb = kb
        self.catalog = catalog
        self.wm: dict[Fact, int] = {}
        self.scheme = SchemeGraph()
        self.trace: list[Firing] = []
        self.status = Status.awaiting()
        self.refractory: set[tuple[Sym, str]] = set()
        self.fact_seq = 0
        self.firing_count = 0
        self.instance_count = 0
        self.req_count = 0
        self.requirement_log: list[FormalRequirement] = []
        self.pending: FormalRequirement | None = None
        self.created_by: dict[Sym, tuple[Sym, int]] = {}

    def next_req_id(self) -> Sym:
        self.req_count += 1
        return Sym(f"r{self.req_count}")

    def assert_fact(self, fact: Fact) -> None:
        if fact not in self.wm:
            self.fact_seq += 1
            self.wm[fact] = self.fact_seq

    def has_fact(self, fact: Fact) -> bool:
        return fact in self.wm

    def clone(self) -> "Session":
        twin = Session(self.kb, self.catalog, self.session_id)
        twin.wm = dict(self.wm)
        twin.scheme = self.scheme
        twin.trace = list(self.trace)
        twin.status = self.status
        twin.refractory = set(self.refractory)
        twin.fact_seq = self.fact_seq
        twin.firing_count = self.firing_count
        twin.instance_count = self.instance_count
        twin.req_count = self.req_count
        twin.requirement_log = list(self.requirement_log)
        twin.pending = self.pending
        twin.created_by = dict(self.created_by)
        return twin


@dataclass(frozen=True)
class EngineOutcome:
    session: Session
    firings: tuple
    status: Status


def new_session(kb: KnowledgeBase, catalog: Catalog, session_id: str = "local") -> Session:
    return Session(kb, catalog, session_id)


def build_agenda(session: Session) -> list:
    agenda = []
    for rule in session.kb.rules:
        for bindings, recency in match_with_support(rule.conditions, session.wm):
            digest = bindings_digest(bindings)
            if (rule.id, digest) in session.refractory:
                continue
            agenda.append(Activation(rule, bindings, recency, digest))
    return agenda


def _ground(term, bindings: Bindings) -> Value:
    if isinstance(term, Var):
        try:
            return bindings[term.name]
        except KeyError:
            raise MalformedValue(f"action variable ?{term.name} is unbound") from None
    return term


def _ground_sym(term, bindings: Bindings, what: str) -> Sym:
    v = _ground(term, bindings)
    if not isinstance(v, Sym):
        raise MalformedValue(f"{what} must be a symbol, got {v!r}")
    return v


class _Staged:
    """Scratch state for one firing; committed only if every action works."""

    def __init__(self, session: Session):
        self.wm = dict(session.wm)
        self.fact_seq = session.fact_seq
        self.instance_count = session.instance_count
        self.instances = list(session.scheme.instances)
        self.connections = list(session.scheme.connections)
        self.new_instances: list[Sym] = []
        self.halted = False

    def instance(self, instance_id: Sym) -> UnitInstance | None:
        for inst in self.instances:
            if inst.instance_id == instance_id:
                return inst
        return None


def _apply_action(staged: _Staged, action, bindings: Bindings, catalog: Catalog) -> dict:
    if isinstance(action, AssertFact):
        fact = Fact(
            _ground_sym(action.entity, bindings, "fact entity"),
            _ground_sym(action.attribute, bindings, "fact attribute"),
            _ground(action.value, bindings),
        )
        if fact.attribute == INSTANCE_OF:
            raise ProtectedFact("instance_of facts are engine-managed")
        if fact not in staged.wm:
            staged.fact_seq += 1
            staged.wm[fact] = staged.fact_seq
        return {"op": "assert", "fact": fact.to_doc()}
    if isinstance(action, RetractFact):
        fact = Fact(
            _ground_sym(action.entity, bindings, "fact entity"),
            _ground_sym(action.attribute, bindings, "fact attribute"),
            _ground(action.value, bindings),
        )
        if fact.attribute == INSTANCE_OF:
            raise ProtectedFact("instance_of facts are engine-managed")
        staged.wm.pop(fact, None)
        return {"op": "retract", "fact": fact.to_doc()}
    if isinstance(action, InstantiateUnit):
        if not catalog.has_unit(action.unit_id):
            raise UnknownUnitInAction(f"unit {action.unit_id} is not in the catalog")
        unit = catalog.unit(action.unit_id)
        staged.instance_count += 1
        instance_id = Sym(f"u{staged.instance_count}")
        params = tuple(sorted(unit.default_params().items()))
        staged.instances.append(UnitInstance(instance_id, unit.id, params))
        staged.new_instances.append(instance_id)
        fact = Fact(instance_id, INSTANCE_OF, unit.id)
        staged.fact_seq += 1
        staged.wm[fact] = staged.fact_seq
        bindings[action.as_var.name] = instance_id
        return {
            "op": "instantiate",
            "unit": str(unit.id),
            "as": action.as_var.name,
            "instance": str(instance_id),
        }
    if isinstance(action, Connect):
        from_id = _ground_sym(action.from_instance, bindings, "connection endpoint")
        to_id = _ground_sym(action.to_instance, bindings, "connection endpoint")
        ends = []
        for end_id, port_name in ((from_id, action.from_port), (to_id, action.to_port)):
            inst = staged.instance(end_id)
            if inst is None:
                raise UnknownInstanceInAction(f"no instance {end_id} in the scheme")
            port = catalog.unit(inst.unit_id).port(port_name)
            if port is None:
                raise UnknownPortInAction(f"no port {port_name} on unit {inst.unit_id}")
            ends.append(port)
        if not check_compatibility(ends[0], ends[1]):
            raise IncompatibleConnection(
                f"{from_id}.{action.from_port} is not compatible with "
                f"{to_id}.{action.to_port}"
            )
        connection = Connection(from_id, action.from_port, to_id, action.to_port)
        if connection not in staged.connections:
            staged.connections.append(connection)
        return {"op": "connect", **connection.to_doc()}
    if isinstance(action, SetParam):
        instance_id = _ground_sym(action.instance, bindings, "param target")
        inst = staged.instance(instance_id)
        if inst is None:
            raise UnknownInstanceInAction(f"no instance {instance_id} in the scheme")
        unit = catalog.unit(inst.unit_id)
        if unit.param_slot(action.slot) is None:
            raise UnknownParamSlot(
                f"unit {unit.id} declares no param slot {action.slot}"
            )
        value = _ground(action.value, bindings)
        params = dict(inst.params)
        params[action.slot] = value
        updated = replace(inst, params=tuple(sorted(params.items())))
        staged.instances = [
            updated if i.instance_id == instance_id else i for i in staged.instances
        ]
        return {
            "op": "set_param",
            "instance": str(instance_id),
            "slot": str(action.slot),
            "value": value_to_doc(value),
        }
    if isinstance(action, RequestNextRequirement):
        return {"op": "request_next"}
    if isinstance(action, Halt):
        staged.halted = True
        return {"op": "halt"}
    raise MalformedValue(f"unknown action: {action!r}")


def _fire(session: Session, activation: Activation) -> tuple[Firing, bool]:
    staged = _Staged(session)
    bindings = dict(activation.bindings)
    applied = []
    for action in activation.rule.actions:
        applied.append(_apply_action(staged, action, bindings, session.catalog))
    session.wm = staged.wm
    session.fact_seq = staged.fact_seq
    session.instance_count = staged.instance_count
    session.scheme = SchemeGraph(tuple(staged.instances), tuple(staged.connections))
    session.firing_count += 1
    for instance_id in staged.new_instances:
        session.created_by[instance_id] = (activation.rule.id, session.firing_count)
    firing = Firing(
        seq=session.firing_count,
        rule_id=activation.rule.id,
        bindings=tuple(sorted(activation.bindings.items())),
        actions_applied=tuple(applied),
    )
    session.trace.append(firing)
    session.refractory.add((activation.rule.id, activation.digest))
    return firing, staged.halted


def run_to_fixpoint(session: Session, select=conflict_resolve) -> tuple[list, bool]:
    """Fire rules until the agenda empties or a halt fires.

    Returns the firings applied and whether a halt was requested. Engine
    failures mark the session failed and stop the run without applying the
    offending firing.
    """
    firings = []
    fired = 0
    halted = False
    while True:
        agenda = build_agenda(session)
        if not agenda:
            break
        activation = select(agenda)
        try:
            if fired >= FIRING_CEILING:
                raise RunawayRuleSet(
                    f"more than {FIRING_CEILING} firings in one submission"
                )
            firing, halted = _fire(session, activation)
        except (EngineFailure, MalformedValue) as err:
            if not isinstance(err, EngineFailure):
                err = EngineFailure(err.message)
            session.status = Status.failed(err)
            return firings, False
        firings.append(firing)
        fired += 1
        if halted:
            break
    return firings, halted


def _is_consumed(session: Session, req_id: Sym) -> bool:
    return session.has_fact(Fact(req_id, STATUS, CONSUMED))


def _resolve_status(session: Session, req: FormalRequirement, halted: bool) -> None:
    if session.status.state == "failed":
        session.pending = None
        return
    if halted:
        session.status = Status.halted()
        session.pending = None
        return
    if _is_consumed(session, req.req_id):
        if req.kind() == DONE:
            session.status = Status.halted()
        else:
            session.status = Status.awaiting()
        session.pending = None
    else:
        session.status = Status.missing_rule(req.req_id)
        session.pending = req


def submit_requirement(session: Session, req: FormalRequirement) -> EngineOutcome:
    """Assert a requirement's facts and run the engine to a fixpoint."""
    if session.status.state != "awaiting_requirement":
        raise SessionNotAwaiting(
            f"session status is {session.status.state}, not awaiting_requirement"
        )
    if any(r.req_id == req.req_id for r in session.requirement_log):
        raise MalformedRequirement(f"requirement id {req.req_id} already submitted")
    text = str(req.req_id)
    if text.startswith("r") and text[1:].isdigit():
        session.req_count = max(session.req_count, int(text[1:]))
    session.requirement_log.append(req)
    for fact in sorted(req.facts, key=Fact.sort_key):
        session.assert_fact(fact)
    firings, halted = run_to_fixpoint(session)
    _resolve_status(session, req, halted)
    return EngineOutcome(session, tuple(firings), session.status)


def retry_pending(session: Session, kb: KnowledgeBase) -> EngineOutcome:
    """Re-run the fixpoint for a stalled requirement against a fresh KB."""
    if session.status.state != "missing_rule" or session.pending is None:
        raise SessionNotAwaiting(
            f"session status is {session.status.state}, not missing_rule"
        )
    req = session.pending
    session.kb = kb
    session.status = Status.awaiting()
    firings, halted = run_to_fixpoint(session)
    _resolve_status(session, req, halted)
    return EngineOutcome(session, tuple(firings), session.status)


# -- Project description ------------------------------------------------------

@dataclass(frozen=True)
class DescribedInstance:
    instance_id: Sym
    unit_id: Sym
    kind: str
    capabilities: tuple
    created_by: tuple    # (rule id, firing seq)

    def to_doc(self) -> dict:
        return {
            "id": str(self.instance_id),
            "unit": str(self.unit_id),
            "kind": self.kind,
            "capabilities": [str(c) for c in self.capabilities],
            "created_by": {"rule": str(self.created_by[0]), "seq": self.created_by[1]},
        }


@dataclass(frozen=True)
class ProjectDescription:
    """Self-contained snapshot of a designed scheme; the codegen input."""

    goal: Sym | None
    instances: tuple
    connections: tuple
    params: tuple          # ((instance id, ((slot, Value), ...)), ...)
    provenance: tuple      # ((rule id, seq), ...)
    kb_version: int
    requirements: tuple
    validation: str = "none"     # none | passed | forced

    def stamped(self) -> bool:
        return self.validation in ("passed", "forced")

    def with_validation(self, stamp: str) -> "ProjectDescription":
        return replace(self, validation=stamp)

    def scheme(self) -> SchemeGraph:
        instances = tuple(
            UnitInstance(
                d.instance_id,
                d.unit_id,
                dict(self.params).get(d.instance_id, ()),
            )
            for d in self.instances
        )
        return SchemeGraph(instances=instances, connections=self.connections)

    def to_doc(self) -> dict:
        return {
            "goal": None if self.goal is None else str(self.goal),
            "instances": [d.to_doc() for d in self.instances],
            "connections": [c.to_doc() for c in self.connections],
            "params": {
                str(inst): {str(slot): value_to_doc(v) for slot, v in pairs}
                for inst, pairs in self.params
            },
            "provenance": [{"rule": str(r), "seq": s} for r, s in self.provenance],
            "kb_version": self.kb_version,
            "requirements": [r.to_doc() for r in self.requirements],
            "validation": self.validation,
        }

    @classmethod
    def from_doc(cls, doc) -> "ProjectDescription":
        try:
            instances = tuple(
                DescribedInstance(
                    instance_id=Sym(d["id"]),
                    unit_id=Sym(d["unit"]),
                    kind=d["kind"],
                    capabilities=tuple(Sym(c) for c in d["capabilities"]),
                    created_by=(
                        Sym(d["created_by"]["rule"]),
                        int(d["created_by"]["seq"]),
                    ),
                )
                for d in doc["instances"]
            )
            params = tuple(
                (
                    Sym(inst),
                    tuple(
                        sorted((Sym(slot), value_from_doc(v)) for slot, v in slots.items())
                    ),
                )
                for inst, slots in sorted(doc.get("params", {}).items())
            )
            return cls(
                goal=None if doc.get("goal") is None else Sym(doc["goal"]),
                instances=instances,
                connections=tuple(Connection.from_doc(c) for c in doc["connections"]),
                params=params,
                provenance=tuple(
                    (Sym(p["rule"]), int(p["seq"])) for p in doc["provenance"]
                ),
                kb_version=int(doc["kb_version"]),
                requirements=tuple(
                    FormalRequirement.from_doc(r) for r in doc["requirements"]
                ),
                validation=doc.get("validation", "none"),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedValue(f"bad project description document: {exc}") from exc


def project_description(session: Session) -> ProjectDescription:
    """Pure snapshot of the session's design state."""
    if session.status.state not in ("awaiting_requirement", "halted"):
        raise SessionNotDescribable(
            f"session status is {session.status.state}; no description available"
        )
    goal = None
    for req in session.requirement_log:
        if req.kind() == Sym("goal"):
            for f in req.facts:
                if f.attribute == Sym("name"):
                    goal = f.value
            break
    instances = []
    params = []
    for inst in session.scheme.instances:
        unit = session.catalog.unit(inst.unit_id)
        instances.append(
            DescribedInstance(
                instance_id=inst.instance_id,
                unit_id=inst.unit_id,
                kind=unit.kind,
                capabilities=tuple(sorted(unit.capabilities)),
                created_by=session.created_by[inst.instance_id],
            )
        )
        if inst.params:
            params.append((inst.instance_id, inst.params))
    return ProjectDescription(
        goal=goal,
        instances=tuple(instances),
        connections=session.scheme.connections,
        params=tuple(params),
        provenance=tuple((f.rule_id, f.seq) for f in session.trace),
        kb_version=session.kb.version,
        requirements=tuple(session.requirement_log),
        validation="none",
    )


def trace_doc(session: Session) -> list:
    return [f.to_doc() for f in session.trace]


def scheme_memory_in_sync(session: Session) -> bool:
    """The (inst, instance_of, unit) facts mirror the scheme exactly."""
    from_wm = {
        (f.entity, f.value) for f in session.wm if f.attribute == INSTANCE_OF
    }
    from_scheme = {
        (i.instance_id, i.unit_id) for i in session.scheme.instances
    }
    return from_wm == from_scheme
