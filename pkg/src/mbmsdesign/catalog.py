"""Catalog of the building blocks an architecture scheme is wired from.

The built-in catalog covers the standard blocks of a model base management
layer: the model base itself, its directory, a model development
environment, a model runtime, solver units, links to the data and knowledge
subsystems, and the user-facing interface. Client catalogs layer external
products on top.
"""

from dataclasses import dataclass

from . import canonical
from .errors import CatalogFormatError, DuplicateUnitId, MalformedValue, UndeclaredInterface
from .facts import Sym
from .frames import Slot

UNIT_KINDS = (
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


@dataclass(frozen=True)
class Port:
    name: Sym
    direction: str                      # provides | requires
    interface_id: Sym
    multiplicity: tuple = (1, 1)        # (min, max); max None is unbounded

    def __post_init__(self):
        if self.direction not in ("provides", "requires"):
            raise MalformedValue(f"bad port direction: {self.direction!r}")
        lo, hi = self.multiplicity
        if lo < 0 or (hi is not None and lo > hi):
            raise MalformedValue(f"bad multiplicity on port {self.name}")

    def to_doc(self) -> dict:
        return {
            "name": str(self.name),
            "direction": self.direction,
            "interface": str(self.interface_id),
            "multiplicity": [self.multiplicity[0], self.multiplicity[1]],
        }

    @classmethod
    def from_doc(cls, doc) -> "Port":
        mult = doc.get("multiplicity", [1, 1])
        return cls(
            name=Sym(doc["name"]),
            direction=doc["direction"],
            interface_id=Sym(doc["interface"]),
            multiplicity=(int(mult[0]), None if mult[1] is None else int(mult[1])),
        )


@dataclass(frozen=True)
class Unit:
    id: Sym
    kind: str
    capabilities: frozenset = frozenset()
    ports: tuple = ()
    params: tuple = ()                  # Slot declarations
    origin: str | None = None           # None means builtin; else product name

    def __post_init__(self):
        if self.kind not in UNIT_KINDS:
            raise MalformedValue(f"unknown unit kind: {self.kind!r}")
        if self.kind == "external_system" and self.origin is None:
            raise MalformedValue(f"external unit {self.id} needs a product origin")
        names = [p.name for p in self.ports]
        if len(names) != len(set(names)):
            raise MalformedValue(f"duplicate port names on unit {self.id}")

    def port(self, name: Sym) -> Port | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None

    def param_slot(self, name: Sym) -> Slot | None:
        for s in self.params:
            if s.name == name:
                return s
        return None

    def default_params(self) -> dict:
        return {s.name: s.default for s in self.params if s.default is not None}

    def to_doc(self) -> dict:
        return {
            "id": str(self.id),
            "kind": self.kind,
            "capabilities": sorted(str(c) for c in self.capabilities),
            "ports": [p.to_doc() for p in self.ports],
            "params": [s.to_doc() for s in self.params],
            "origin": "builtin" if self.origin is None else {"external": self.origin},
        }

    @classmethod
    def from_doc(cls, doc) -> "Unit":
        origin_doc = doc.get("origin", "builtin")
        if origin_doc == "builtin":
            origin = None
        elif isinstance(origin_doc, dict) and set(origin_doc) == {"external"}:
            origin = str(origin_doc["external"])
        else:
            raise MalformedValue(f"bad unit origin: {origin_doc!r}")
        return cls(
            id=Sym(doc["id"]),
            kind=doc["kind"],
            capabilities=frozenset(Sym(c) for c in doc.get("capabilities", [])),
            ports=tuple(Port.from_doc(p) for p in doc.get("ports", [])),
            params=tuple(Slot.from_doc(s) for s in doc.get("params", [])),
            origin=origin,
        )


@dataclass(frozen=True)
class Catalog:
    units: tuple = ()
    interfaces: frozenset = frozenset()

    def unit(self, unit_id: Sym) -> Unit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise CatalogFormatError(f"unit {unit_id} is not in the catalog")

    def has_unit(self, unit_id: Sym) -> bool:
        return any(u.id == unit_id for u in self.units)

    def to_doc(self) -> dict:
        return {
            "interfaces": sorted(str(i) for i in self.interfaces),
            "units": [u.to_doc() for u in self.units],
        }


def _validate_catalog(catalog: Catalog) -> None:
    ids = [u.id for u in catalog.units]
    if len(ids) != len(set(ids)):
        dupes = sorted({str(i) for i in ids if ids.count(i) > 1})
        raise DuplicateUnitId(f"duplicate unit ids: {', '.join(dupes)}")
    for u in catalog.units:
        for p in u.ports:
            if p.interface_id not in catalog.interfaces:
                raise UndeclaredInterface(
                    f"port {u.id}.{p.name} uses undeclared interface {p.interface_id}"
                )


def _sym(s: str) -> Sym:
    return Sym(s)


def builtin_catalog() -> Catalog:
    """The fixed built-in ontology; identical on every run."""
    s = _sym
    interfaces = frozenset(
        s(i) for i in ("model_access", "solver_access", "data_access", "knowledge_access", "ui_access")
    )
    units = (
        Unit(
            id=s("unit_data_mgmt_link"),
            kind="data_mgmt_link",
            capabilities=frozenset({s("data_bridge")}),
            ports=(Port(s("data_api"), "provides", s("data_access")),),
        ),
        Unit(
            id=s("unit_dss_user_interface"),
            kind="dss_user_interface",
            capabilities=frozenset({s("pmd_frontend")}),
            ports=(Port(s("session_port"), "requires", s("ui_access")),),
            params=(
                Slot(s("goal"), "symbol"),
                Slot(s("access_mode"), "symbol", default=s("web")),
            ),
        ),
        Unit(
            id=s("unit_genetic_solver"),
            kind="solver",
            capabilities=frozenset({s("genetic_algorithm")}),
            ports=(Port(s("solve_api"), "provides", s("solver_access")),),
            params=(Slot(s("population_size"), "integer", default=100),),
        ),
        Unit(
            id=s("unit_knowledge_mgmt_link"),
            kind="knowledge_mgmt_link",
            capabilities=frozenset({s("knowledge_bridge")}),
            ports=(Port(s("knowledge_api"), "provides", s("knowledge_access")),),
        ),
        Unit(
            id=s("unit_model_base"),
            kind="model_base",
            capabilities=frozenset({s("model_storage")}),
            ports=(
                Port(s("model_api"), "provides", s("model_access"), (1, None)),
                Port(s("km_port"), "requires", s("knowledge_access")),
            ),
            params=(Slot(s("storage_backend"), "symbol", default=s("file")),),
        ),
        Unit(
            id=s("unit_model_dev_env"),
            kind="model_dev_env",
            capabilities=frozenset({s("mdl")}),
            ports=(Port(s("authoring_port"), "requires", s("model_access")),),
        ),
        Unit(
            id=s("unit_model_directory"),
            kind="model_directory",
            capabilities=frozenset({s("model_lookup")}),
            ports=(Port(s("catalog_port"), "requires", s("model_access")),),
        ),
        Unit(
            id=s("unit_model_runtime"),
            kind="model_runtime",
            capabilities=frozenset({s("mml")}),
            ports=(
                Port(s("exec_port"), "requires", s("model_access")),
                Port(s("solver_port"), "requires", s("solver_access"), (1, None)),
                Port(s("data_port"), "requires", s("data_access")),
                Port(s("ui_port"), "provides", s("ui_access")),
            ),
            params=(Slot(s("max_threads"), "integer", default=1),),
        ),
        Unit(
            id=s("unit_simplex_solver"),
            kind="solver",
            capabilities=frozenset({s("linear_programming")}),
            ports=(Port(s("solve_api"), "provides", s("solver_access")),),
            params=(Slot(s("tolerance"), "decimal", default=0.000001),),
        ),
    )
    catalog = Catalog(units=units, interfaces=interfaces)
    _validate_catalog(catalog)
    return catalog


def find_units(catalog: Catalog, capability: Sym) -> list:
    """Units advertising a capability, ordered by id."""
    capability = Sym(capability)
    return sorted(
        (u for u in catalog.units if capability in u.capabilities),
        key=lambda u: u.id,
    )


def check_compatibility(a: Port, b: Port) -> bool:
    """Ports connect when directions are opposite and interfaces equal."""
    return a.direction != b.direction and a.interface_id == b.interface_id


def load_catalog(document: bytes | str) -> Catalog:
    """Parse a catalog file and merge it over the built-in catalog."""
    text = document.decode("utf-8") if isinstance(document, bytes) else document
    if not text.strip():
        return builtin_catalog()
    try:
        doc = canonical.loads(text)
    except ValueError as exc:
        raise CatalogFormatError(f"catalog file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CatalogFormatError("catalog document must be an object")
    base = builtin_catalog()
    try:
        extra_interfaces = frozenset(Sym(i) for i in doc.get("interfaces", []))
        extra_units = tuple(Unit.from_doc(u) for u in doc.get("units", []))
    except (MalformedValue, KeyError, TypeError) as exc:
        raise CatalogFormatError(f"bad catalog document: {exc}") from exc
    merged = Catalog(
        units=base.units + extra_units,
        interfaces=base.interfaces | extra_interfaces,
    )
    _validate_catalog(merged)
    return merged


def load_catalog_file(path: str) -> Catalog:
    with open(path, "rb") as fh:
        return load_catalog(fh.read())
