"""Design automation for model base management architectures.

Requirements written in a small statement language are formalized into
facts, a forward-chaining rule engine assembles a scheme of catalog units,
frame comparison validates the scheme, and deterministic scaffolding is
generated from the resulting project description.
"""

from .catalog import (
    Catalog,
    Port,
    Unit,
    builtin_catalog,
    check_compatibility,
    find_units,
    load_catalog,
)
from .engine import (
    EngineOutcome,
    ProjectDescription,
    SchemeGraph,
    Session,
    UnitInstance,
    conflict_resolve,
    new_session,
    project_description,
    retry_pending,
    run_to_fixpoint,
    submit_requirement,
)
from .facts import Fact, Pattern, Sym, Value, Var
from .frames import Constraint, Frame, Slot, resolve_frame
from .kb import (
    KnowledgeBase,
    ProductionRule,
    add_rule,
    export_subset,
    link_rule_to_units,
    load_kb,
    save_kb,
)
from .matching import match_conditions, match_pattern
from .reqdsl import (
    FormalRequirement,
    RawRequirement,
    formalize,
    parse_requirements,
    pretty_print,
)
from .shipped import shipped_catalog, shipped_kb
from .validator import ValidationReport, match_pattern_frame, scheme_to_frame, validate

__all__ = [
    "Catalog",
    "Constraint",
    "EngineOutcome",
    "Fact",
    "FormalRequirement",
    "Frame",
    "KnowledgeBase",
    "Pattern",
    "Port",
    "ProductionRule",
    "ProjectDescription",
    "RawRequirement",
    "SchemeGraph",
    "Session",
    "Slot",
    "Sym",
    "Unit",
    "UnitInstance",
    "ValidationReport",
    "Value",
    "Var",
    "add_rule",
    "builtin_catalog",
    "check_compatibility",
    "conflict_resolve",
    "export_subset",
    "find_units",
    "formalize",
    "link_rule_to_units",
    "load_catalog",
    "load_kb",
    "match_conditions",
    "match_pattern",
    "match_pattern_frame",
    "new_session",
    "parse_requirements",
    "pretty_print",
    "project_description",
    "resolve_frame",
    "retry_pending",
    "run_to_fixpoint",
    "save_kb",
    "scheme_to_frame",
    "shipped_catalog",
    "shipped_kb",
    "submit_requirement",
    "validate",
]
