"""The shipped starter knowledge base and product catalog.

The starter pack targets linear-programming decision support: its rules
erect the standard core block set, register models and methods against the
LP toolchain, pick solvers, and integrate the external products it knows
about. Requirements it has no rule for stall the session until the
knowledge base is extended, which is the designed recovery path.
"""

from . import canonical
from .actions import (
    AssertFact,
    Connect,
    Halt,
    InstantiateUnit,
    RequestNextRequirement,
    SetParam,
)
from .catalog import Catalog, load_catalog
from .facts import Pattern, Sym, Var
from .frames import Constraint, Frame, Slot
from .kb import KnowledgeBase, ProductionRule, kb_from_doc

_s = Sym
_v = Var


def _p(entity, attribute, value, negated=False) -> Pattern:
    return Pattern(entity, attribute, value, negated)


def _count_slot(kind: str, required: bool, card) -> Slot:
    return Slot(
        name=_s(f"{kind}_count"),
        value_type="integer",
        cardinality=card,
        required=required,
    )


_KINDS = (
    "model_base",
    "model_directory",
    "model_dev_env",
    "model_runtime",
    "solver",
    "data_mgmt_link",
    "knowledge_mgmt_link",
    "dss_user_interface",
    "external_system",
)

_LP = _s("linear_programming")
_CONSUMED = (_s("status"), _s("consumed"))


def _consume(var_name: str) -> AssertFact:
    return AssertFact(_v(var_name), *_CONSUMED)


def _bootstrap_rule() -> ProductionRule:
    r, g = _v("r"), _v("g")
    mb, md, de, mr, dl, kl, ui = (
        _v("mb"), _v("md"), _v("de"), _v("mr"), _v("dl"), _v("kl"), _v("ui"),
    )
    return ProductionRule(
        id=_s("bootstrap_core"),
        salience=100,
        conditions=(
            _p(r, _s("kind"), _s("goal")),
            _p(r, _s("name"), g),
            _p(_s("core"), _s("status"), _s("built"), negated=True),
        ),
        actions=(
            InstantiateUnit(_s("unit_model_base"), mb),
            InstantiateUnit(_s("unit_model_directory"), md),
            InstantiateUnit(_s("unit_model_dev_env"), de),
            InstantiateUnit(_s("unit_model_runtime"), mr),
            InstantiateUnit(_s("unit_data_mgmt_link"), dl),
            InstantiateUnit(_s("unit_knowledge_mgmt_link"), kl),
            InstantiateUnit(_s("unit_dss_user_interface"), ui),
            Connect(de, _s("authoring_port"), mb, _s("model_api")),
            Connect(mr, _s("exec_port"), mb, _s("model_api")),
            Connect(md, _s("catalog_port"), mb, _s("model_api")),
            Connect(ui, _s("session_port"), mr, _s("ui_port")),
            Connect(mr, _s("data_port"), dl, _s("data_api")),
            Connect(mb, _s("km_port"), kl, _s("knowledge_api")),
            SetParam(ui, _s("goal"), g),
            AssertFact(_s("core"), _s("status"), _s("built")),
            AssertFact(_s("core"), _s("default_capability"), _LP),
            _consume("r"),
            RequestNextRequirement(),
        ),
        linked_units=frozenset(
            _s(u)
            for u in (
                "unit_model_base",
                "unit_model_directory",
                "unit_model_dev_env",
                "unit_model_runtime",
                "unit_data_mgmt_link",
                "unit_knowledge_mgmt_link",
                "unit_dss_user_interface",
            )
        ),
        doc="Erect the core block set for a linear-programming DSS and wire it.",
    )


def _register_model_rule() -> ProductionRule:
    r, c, n, mb = _v("r"), _v("c"), _v("n"), _v("mb")
    return ProductionRule(
        id=_s("register_model"),
        salience=50,
        conditions=(
            _p(r, _s("kind"), _s("model_requirement")),
            _p(r, _s("category"), c),
            _p(r, _s("name"), n),
            _p(mb, _s("instance_of"), _s("unit_model_base")),
        ),
        actions=(
            AssertFact(mb, _s("has_model"), n),
            AssertFact(n, _s("model_category"), c),
            AssertFact(n, _s("solver_capability"), _LP),
            _consume("r"),
        ),
        linked_units=frozenset({_s("unit_model_base")}),
        doc="File a required model in the model base under the LP toolchain.",
    )


def _simplex_method_rule() -> ProductionRule:
    r = _v("r")
    return ProductionRule(
        id=_s("map_simplex_method"),
        salience=50,
        conditions=(
            _p(r, _s("kind"), _s("method_requirement")),
            _p(r, _s("method"), _s("simplex")),
        ),
        actions=(
            AssertFact(_s("design"), _s("needs_capability"), _LP),
            _consume("r"),
        ),
        linked_units=frozenset({_s("unit_simplex_solver")}),
        doc="The simplex method needs a linear programming solver.",
    )


def _select_lp_solver_rule() -> ProductionRule:
    r, mr, s, s2 = _v("r"), _v("mr"), _v("s"), _v("s2")
    return ProductionRule(
        id=_s("select_lp_solver"),
        salience=40,
        conditions=(
            _p(r, _s("kind"), _s("solver_requirement")),
            _p(r, _s("capability"), _LP),
            _p(mr, _s("instance_of"), _s("unit_model_runtime")),
            _p(s, _s("provides_capability"), _LP, negated=True),
        ),
        actions=(
            InstantiateUnit(_s("unit_simplex_solver"), s2),
            Connect(mr, _s("solver_port"), s2, _s("solve_api")),
            AssertFact(s2, _s("provides_capability"), _LP),
            _consume("r"),
        ),
        linked_units=frozenset({_s("unit_simplex_solver")}),
        doc="Provide the built-in simplex solver when LP capability is required.",
    )


def _integrate_solver_rule(rule_id: str, product: str, unit_id: str, capability: str) -> ProductionRule:
    r, mr, x = _v("r"), _v("mr"), _v("x")
    return ProductionRule(
        id=_s(rule_id),
        salience=40,
        conditions=(
            _p(r, _s("kind"), _s("external_requirement")),
            _p(r, _s("external_kind"), _s("solver")),
            _p(r, _s("product"), product),
            _p(mr, _s("instance_of"), _s("unit_model_runtime")),
        ),
        actions=(
            InstantiateUnit(_s(unit_id), x),
            Connect(mr, _s("solver_port"), x, _s("solve_api")),
            AssertFact(x, _s("provides_capability"), _s(capability)),
            _consume("r"),
        ),
        linked_units=frozenset({_s(unit_id)}),
        doc=f"Integrate the external solver product {product}.",
    )


def _integrate_cae_rule(rule_id: str, product: str, unit_id: str, capability: str) -> ProductionRule:
    r, mb, x = _v("r"), _v("mb"), _v("x")
    return ProductionRule(
        id=_s(rule_id),
        salience=40,
        conditions=(
            _p(r, _s("kind"), _s("external_requirement")),
            _p(r, _s("external_kind"), _s("cae")),
            _p(r, _s("product"), product),
            _p(mb, _s("instance_of"), _s("unit_model_base")),
        ),
        actions=(
            InstantiateUnit(_s(unit_id), x),
            Connect(x, _s("model_feed"), mb, _s("model_api")),
            AssertFact(x, _s("provides_capability"), _s(capability)),
            _consume("r"),
        ),
        linked_units=frozenset({_s(unit_id)}),
        doc=f"Feed models authored in {product} into the model base.",
    )


def _param_rule(rule_id: str, target: str, slot: str, unit_id: str) -> ProductionRule:
    r, v, i = _v("r"), _v("v"), _v("i")
    return ProductionRule(
        id=_s(rule_id),
        salience=30,
        conditions=(
            _p(r, _s("kind"), _s("param_requirement")),
            _p(r, _s("target"), _s(target)),
            _p(r, _s("slot"), _s(slot)),
            _p(r, _s("value"), v),
            _p(i, _s("instance_of"), _s(unit_id)),
        ),
        actions=(
            SetParam(i, _s(slot), v),
            _consume("r"),
        ),
        linked_units=frozenset({_s(unit_id)}),
        doc=f"Apply a requested {slot} value to the {target} unit.",
    )


def _finish_rule() -> ProductionRule:
    r = _v("r")
    return ProductionRule(
        id=_s("finish_design"),
        salience=10,
        conditions=(
            _p(r, _s("kind"), _s("done")),
            _p(_s("core"), _s("default_capability"), _LP),
        ),
        actions=(_consume("r"), Halt()),
        linked_units=frozenset(),
        doc="Close the session once the LP core has been erected.",
    )


def _shipped_frames() -> tuple:
    skeleton = Frame(
        name=_s("scheme_skeleton"),
        kind="prototype",
        slots=tuple(_count_slot(k, required=False, card=(0, None)) for k in _KINDS),
    )
    prototype = Frame(
        name=_s("mbms_prototype"),
        kind="prototype",
        isa=_s("scheme_skeleton"),
        slots=(
            _count_slot("model_base", True, (1, 1)),
            _count_slot("model_directory", True, (1, 1)),
            _count_slot("model_dev_env", True, (1, 1)),
            _count_slot("model_runtime", True, (1, 1)),
            _count_slot("solver", True, (1, None)),
            _count_slot("data_mgmt_link", True, (1, 1)),
            _count_slot("knowledge_mgmt_link", True, (1, 1)),
            _count_slot("dss_user_interface", True, (1, 1)),
        ),
    )
    solverless = Frame(
        name=_s("solver_without_runtime"),
        kind="pattern",
        slots=(
            Slot(
                name=_s("solver_count"),
                value_type="integer",
                cardinality=(0, None),
                constraint=Constraint("count_range", lo=1, hi=None),
            ),
            Slot(
                name=_s("model_runtime_count"),
                value_type="integer",
                cardinality=(0, None),
                constraint=Constraint("equals", value=0),
            ),
        ),
        message=(
            "Solvers cannot run without a model runtime; add one and route "
            "solver ports through it."
        ),
    )
    unreachable_ui = Frame(
        name=_s("unreachable_ui"),
        kind="pattern",
        slots=(
            Slot(
                name=_s("dss_user_interface_count"),
                value_type="integer",
                cardinality=(0, None),
                constraint=Constraint("count_range", lo=1, hi=None),
            ),
            Slot(
                name=_s("conn_dss_user_interface__model_runtime"),
                value_type="integer",
                cardinality=(0, None),
                constraint=Constraint("equals", value=0),
            ),
        ),
        message=(
            "The user interface is not wired to a model runtime; connect its "
            "session port to a runtime ui port."
        ),
    )
    return (skeleton, prototype, solverless, unreachable_ui)


def shipped_kb() -> KnowledgeBase:
    """The starter knowledge base, identical on every run."""
    rules = (
        _bootstrap_rule(),
        _register_model_rule(),
        _simplex_method_rule(),
        _select_lp_solver_rule(),
        _integrate_solver_rule(
            "integrate_lindo_api", "LINDO API", "unit_lindo_api", "linear_programming"
        ),
        _integrate_solver_rule(
            "integrate_bendx", "BendX Stochastic Solver", "unit_bendx_solver",
            "stochastic_programming",
        ),
        _integrate_solver_rule(
            "integrate_oml", "OML", "unit_oml", "optimization_modeling"
        ),
        _integrate_solver_rule(
            "integrate_risk_solver", "Risk Solver Platform",
            "unit_risk_solver_platform", "risk_analysis",
        ),
        _integrate_cae_rule(
            "integrate_anylogic", "AnyLogic", "unit_anylogic", "simulation"
        ),
        _integrate_cae_rule(
            "integrate_matlab", "MatLab", "unit_matlab", "numeric_computation"
        ),
        _integrate_cae_rule(
            "integrate_mathcad", "MathCad", "unit_mathcad", "engineering_calculation"
        ),
        _param_rule(
            "set_runtime_threads", "model_runtime", "max_threads", "unit_model_runtime"
        ),
        _param_rule(
            "set_ui_access_mode", "dss_user_interface", "access_mode",
            "unit_dss_user_interface",
        ),
        _finish_rule(),
    )
    return KnowledgeBase(
        rules=rules,
        frames=_shipped_frames(),
        version=1,
        meta=(("title", "linear programming DSS starter pack"),),
    )


def _external_unit(unit_id: str, product: str, capability: str, solver: bool) -> dict:
    if solver:
        ports = [
            {
                "name": "solve_api",
                "direction": "provides",
                "interface": "solver_access",
                "multiplicity": [1, 1],
            }
        ]
    else:
        ports = [
            {
                "name": "model_feed",
                "direction": "requires",
                "interface": "model_access",
                "multiplicity": [1, 1],
            }
        ]
    return {
        "id": unit_id,
        "kind": "external_system",
        "capabilities": [capability],
        "ports": ports,
        "params": [],
        "origin": {"external": product},
    }


def external_products_doc() -> dict:
    """Catalog overlay with the supported external products.

    Capability assignments are illustrative single tags per product.
    """
    return {
        "interfaces": [],
        "units": [
            _external_unit("unit_anylogic", "AnyLogic", "simulation", solver=False),
            _external_unit(
                "unit_bendx_solver", "BendX Stochastic Solver",
                "stochastic_programming", solver=True,
            ),
            _external_unit("unit_lindo_api", "LINDO API", "linear_programming", solver=True),
            _external_unit("unit_mathcad", "MathCad", "engineering_calculation", solver=False),
            _external_unit("unit_matlab", "MatLab", "numeric_computation", solver=False),
            _external_unit("unit_oml", "OML", "optimization_modeling", solver=True),
            _external_unit(
                "unit_risk_solver_platform", "Risk Solver Platform",
                "risk_analysis", solver=True,
            ),
        ],
    }


def shipped_catalog() -> Catalog:
    """Built-in catalog merged with the external product overlay."""
    return load_catalog(canonical.encode(external_products_doc()))


LP_SESSION_SCRIPT = """\
# Linear programming DSS design session
goal lp_dss
require model operational production_plan
require method simplex
require solver linear_programming
integrate external solver "LINDO API"
done
"""


def shipped_kb_bytes() -> bytes:
    return canonical.encode(shipped_kb().to_doc())


def shipped_catalog_bytes() -> bytes:
    return canonical.encode(external_products_doc())


def write_data_files(directory: str) -> None:
    """Regenerate the committed data files from the in-code constructors."""
    import os

    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "starter.mbkb"), "wb") as fh:
        fh.write(shipped_kb_bytes())
    with open(os.path.join(directory, "external_products.mbcat"), "wb") as fh:
        fh.write(shipped_catalog_bytes())
    with open(os.path.join(directory, "lp_session.req"), "w", encoding="utf-8") as fh:
        fh.write(LP_SESSION_SCRIPT)


def roundtrip_check() -> KnowledgeBase:
    """Parse the shipped KB back from its archive form, validating it."""
    return kb_from_doc(canonical.loads(shipped_kb_bytes()), shipped_catalog())
