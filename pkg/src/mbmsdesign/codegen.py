"""Deterministic scaffolding generation from a project description.

Output is a pure function of the description and the template set: same
inputs, same bytes, on every platform. Templates support field
substitution ({{path.to.field}}) and repetition ({{#each list}}...{{/each}})
and nothing else.
"""

import io
import os
import zipfile
from dataclasses import dataclass

from . import canonical
from .engine import ProjectDescription
from .errors import MalformedValue, TemplateFieldUnresolved, UnstampedDescription
from .facts import render_value

TEMPLATE_VERSION = "1"


@dataclass(frozen=True)
class FileSet:
    """Ordered, collision-free relative paths with their contents."""

    files: tuple    # ((path, bytes), ...) sorted by path

    def __post_init__(self):
        paths = [p for p, _ in self.files]
        if len(paths) != len(set(paths)):
            raise MalformedValue("duplicate paths in file set")
        for p in paths:
            if p.startswith("/") or ".." in p.split("/") or p == "":
                raise MalformedValue(f"bad relative path: {p!r}")
        if paths != sorted(paths):
            raise MalformedValue("file set paths must be sorted")

    def paths(self) -> list:
        return [p for p, _ in self.files]

    def content(self, path: str) -> bytes:
        for p, data in self.files:
            if p == path:
                return data
        raise KeyError(path)


@dataclass(frozen=True)
class TemplateSet:
    templates: tuple    # ((name, text), ...)
    version: str = TEMPLATE_VERSION

    def get(self, name: str) -> str:
        for n, text in self.templates:
            if n == name:
                return text
        raise TemplateFieldUnresolved(name)


# -- Template rendering -------------------------------------------------------

def _resolve(path: str, scopes: list):
    if path == ".":
        return scopes[-1]
    parts = path.split(".")
    current = None
    # The first segment is looked up innermost scope outward, so loop bodies
    # still see top-level fields.
    for scope in reversed(scopes):
        if isinstance(scope, dict) and parts[0] in scope:
            current = scope[parts[0]]
            break
    else:
        raise TemplateFieldUnresolved(path)
    for part in parts[1:]:
        if isinstance(current, dict) and part in current:
            current = current[part]
        else:
            raise TemplateFieldUnresolved(path)
    return current


def _render_scalar(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return render_value(value)
    raise MalformedValue(f"template field is not a scalar: {value!r}")


def render_template(text: str, scope: dict) -> str:
    """Substitute {{fields}} and expand {{#each list}} blocks."""
    return _render(text, [scope])


def _render(text: str, scopes: list) -> str:
    out = []
    i = 0
    while i < len(text):
        start = text.find("{{", i)
        if start < 0:
            out.append(text[i:])
            break
        out.append(text[i:start])
        end = text.find("}}", start)
        if end < 0:
            raise MalformedValue("unterminated {{ in template")
        tag = text[start + 2:end].strip()
        if tag.startswith("#each "):
            name = tag[len("#each "):].strip()
            body_start = end + 2
            close = _find_close(text, body_start)
            body = text[body_start:close]
            items = _resolve(name, scopes)
            if not isinstance(items, list):
                raise TemplateFieldUnresolved(name)
            for item in items:
                out.append(_render(body, scopes + [item]))
            i = close + len("{{/each}}")
        elif tag == "/each":
            raise MalformedValue("unmatched {{/each}} in template")
        else:
            out.append(_render_scalar(_resolve(tag, scopes)))
            i = end + 2
    return "".join(out)


def _find_close(text: str, start: int) -> int:
    depth = 1
    i = start
    while i < len(text):
        open_pos = text.find("{{#each ", i)
        close_pos = text.find("{{/each}}", i)
        if close_pos < 0:
            raise MalformedValue("unterminated {{#each}} in template")
        if 0 <= open_pos < close_pos:
            depth += 1
            i = open_pos + len("{{#each ")
            continue
        depth -= 1
        if depth == 0:
            return close_pos
        i = close_pos + len("{{/each}}")
    raise MalformedValue("unterminated {{#each}} in template")


# -- Built-in templates -------------------------------------------------------

STUB_TEMPLATE = (
    "# unit stub {{id}}\n"
    "unit = {{unit}}\n"
    "kind = {{kind}}\n"
    "capabilities = {{capabilities_csv}}\n"
    "created_by = {{created_by}}\n"
    "{{#each params}}param {{name}} = {{value}}\n"
    "{{/each}}"
)

WIRING_TEMPLATE = (
    "# wiring: from_instance.port -> to_instance.port\n"
    "{{#each connections}}{{from}}.{{from_port}} -> {{to}}.{{to_port}}\n"
    "{{/each}}"
)

DESIGN_TEMPLATE = (
    "# MBMS project design\n"
    "\n"
    "goal: {{goal}}\n"
    "knowledge base version: {{kb_version}}\n"
    "validation: {{validation}}\n"
    "\n"
    "## Units\n"
    "{{#each instances}}- {{id}}: {{unit}} ({{kind}})\n"
    "{{/each}}\n"
    "## Connections\n"
    "{{#each connections}}- {{from}}.{{from_port}} -> {{to}}.{{to_port}}\n"
    "{{/each}}\n"
    "## Requirements\n"
    "{{#each requirements}}- {{id}}: {{summary}}\n"
    "{{/each}}\n"
    "## Provenance\n"
    "{{#each provenance}}- firing {{seq}}: rule {{rule}}\n"
    "{{/each}}"
)


def default_templates() -> TemplateSet:
    return TemplateSet(
        templates=(
            ("design_doc", DESIGN_TEMPLATE),
            ("unit_stub", STUB_TEMPLATE),
            ("wiring", WIRING_TEMPLATE),
        ),
        version=TEMPLATE_VERSION,
    )


# -- Manifest -----------------------------------------------------------------

def canonical_manifest(pd: ProjectDescription) -> bytes:
    """Unique bytes for structurally equal descriptions."""
    return canonical.encode(pd.to_doc())


def parse_manifest(data: bytes | str) -> ProjectDescription:
    try:
        doc = canonical.loads(data)
    except ValueError as exc:
        raise MalformedValue(f"manifest is not valid JSON: {exc}") from exc
    return ProjectDescription.from_doc(doc)


# -- Scaffolding --------------------------------------------------------------

def _scaffold_scope(pd: ProjectDescription) -> dict:
    params = dict(pd.params)
    instances = []
    for inst in pd.instances:
        rule, seq = inst.created_by
        instances.append(
            {
                "id": str(inst.instance_id),
                "unit": str(inst.unit_id),
                "kind": inst.kind,
                "capabilities_csv": ", ".join(str(c) for c in inst.capabilities),
                "created_by": f"rule {rule} (firing {seq})",
                "params": [
                    {"name": str(slot), "value": render_value(v)}
                    for slot, v in params.get(inst.instance_id, ())
                ],
            }
        )
    requirements = []
    for req in pd.requirements:
        pairs = sorted(
            (str(f.attribute), render_value(f.value)) for f in req.facts
        )
        summary = "; ".join(f"{a} = {v}" for a, v in pairs)
        requirements.append({"id": str(req.req_id), "summary": summary})
    return {
        "goal": "(none)" if pd.goal is None else str(pd.goal),
        "kb_version": str(pd.kb_version),
        "validation": pd.validation,
        "instances": instances,
        "connections": [c.to_doc() for c in pd.connections],
        "requirements": requirements,
        "provenance": [
            {"seq": str(seq), "rule": str(rule)} for rule, seq in pd.provenance
        ],
    }


def generate_scaffold(
    pd: ProjectDescription, templates: TemplateSet | None = None
) -> FileSet:
    """Render the manifest, per-unit stubs, wiring file and design doc."""
    if not pd.stamped():
        raise UnstampedDescription(
            "description has no validation stamp; validate it or force generation"
        )
    templates = templates or default_templates()
    scope = _scaffold_scope(pd)
    files = [("mbms.manifest", canonical_manifest(pd))]
    stub_template = templates.get("unit_stub")
    for inst_scope in scope["instances"]:
        rendered = render_template(stub_template, {**scope, **inst_scope})
        files.append((f"units/{inst_scope['id']}.stub", rendered.encode("utf-8")))
    files.append(
        ("wiring.conf", render_template(templates.get("wiring"), scope).encode("utf-8"))
    )
    files.append(
        ("DESIGN.md", render_template(templates.get("design_doc"), scope).encode("utf-8"))
    )
    return FileSet(files=tuple(sorted(files)))


def write_fileset(fileset: FileSet, out_dir) -> None:
    for path, data in fileset.files:
        full = os.path.join(out_dir, path)
        os.makedirs(os.path.dirname(full) or out_dir, exist_ok=True)
        with open(full, "wb") as fh:
            fh.write(data)


def zip_fileset(fileset: FileSet) -> bytes:
    """A stable zip: fixed timestamps, stored entries, sorted paths."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_STORED) as zf:
        for path, data in fileset.files:
            info = zipfile.ZipInfo(path, date_time=(1980, 1, 1, 0, 0, 0))
            info.external_attr = 0o644 << 16
            zf.writestr(info, data)
    return buf.getvalue()
