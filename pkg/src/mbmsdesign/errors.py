"""Domain error hierarchy. Every error carries a stable machine code."""


class DesignError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "design_error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_doc(self) -> dict:
        doc = {"error": self.code, "detail": self.message}
        doc.update(self.details)
        return doc


class ParseError(DesignError):
    code = "parse_error"

    def __init__(self, message: str, line: int, column: int, expected: tuple):
        super().__init__(
            message, line=line, column=column, expected=sorted(expected)
        )
        self.line = line
        self.column = column
        self.expected = frozenset(expected)


class MalformedValue(DesignError):
    code = "malformed_value"


class DuplicateRuleId(DesignError):
    code = "duplicate_rule_id"


class UnboundActionVariable(DesignError):
    code = "unbound_action_variable"

    def __init__(self, variable: str):
        super().__init__(
            f"action variable ?{variable} is not bound by any non-negated "
            "condition",
            variable=variable,
        )
        self.variable = variable


class MalformedRule(DesignError):
    code = "malformed_rule"


class UnknownRule(DesignError):
    code = "unknown_rule"


class UnknownUnit(DesignError):
    code = "unknown_unit"

    def __init__(self, unit_id: str):
        super().__init__(f"unit {unit_id} is not in the catalog", unit=unit_id)
        self.unit_id = unit_id


class UnknownFrame(DesignError):
    code = "unknown_frame"


class CyclicInheritance(DesignError):
    code = "cyclic_inheritance"

    def __init__(self, cycle: list):
        super().__init__(
            "frame inheritance cycle: " + " -> ".join(cycle), cycle=list(cycle)
        )
        self.cycle = list(cycle)


class KindMismatch(DesignError):
    code = "kind_mismatch"


class EmptySelection(DesignError):
    code = "empty_selection"


class ArchiveFormatError(DesignError):
    code = "archive_format_error"


class CatalogFormatError(DesignError):
    code = "catalog_format_error"


class DuplicateUnitId(DesignError):
    code = "duplicate_unit_id"


class UndeclaredInterface(DesignError):
    code = "undeclared_interface"


class MalformedRequirement(DesignError):
    code = "malformed_requirement"


class SessionNotAwaiting(DesignError):
    code = "session_not_awaiting"


class SessionNotDescribable(DesignError):
    code = "session_not_describable"


class EngineFailure(DesignError):
    """Errors that poison a session; the session status becomes failed."""

    code = "engine_failure"


class IncompatibleConnection(EngineFailure):
    code = "incompatible_connection"


class UnknownPortInAction(EngineFailure):
    code = "unknown_port_in_action"


class UnknownUnitInAction(EngineFailure):
    code = "unknown_unit_in_action"


class UnknownInstanceInAction(EngineFailure):
    code = "unknown_instance_in_action"


class UnknownParamSlot(EngineFailure):
    code = "unknown_param_slot"


class ProtectedFact(EngineFailure):
    code = "protected_fact"


class RunawayRuleSet(EngineFailure):
    code = "runaway_rule_set"


class TemplateFieldUnresolved(DesignError):
    code = "template_field_unresolved"

    def __init__(self, path: str):
        super().__init__(f"template field {path} does not resolve", path=path)
        self.path = path


class UnstampedDescription(DesignError):
    code = "unstamped_description"
