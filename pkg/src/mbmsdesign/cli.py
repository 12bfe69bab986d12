"""Command line interface.

Exit codes: 0 success, 1 domain error (reported on stderr as a canonical
document), 2 usage error.
"""

import sys

import click

from . import canonical
from .catalog import load_catalog_file
from .codegen import (
    default_templates,
    generate_scaffold,
    parse_manifest,
    write_fileset,
)
from .engine import (
    new_session,
    project_description,
    retry_pending,
    submit_requirement,
)
from .errors import DesignError, EmptySelection
from .kb import (
    ProductionRule,
    add_rule,
    export_subset,
    kb_warnings,
    link_rule_to_units,
    load_kb_file,
    save_kb,
)
from .facts import Sym
from .reqdsl import formalize, parse_requirements
from .shipped import shipped_catalog, shipped_kb
from .validator import validate


def _fail(err: DesignError) -> None:
    sys.stderr.write(canonical.dumps(err.to_doc()))
    sys.exit(1)


def _fail_io(err: OSError) -> None:
    sys.stderr.write(canonical.dumps({"error": "io_error", "detail": str(err)}))
    sys.exit(1)


def _fail_doc(doc: dict) -> None:
    sys.stderr.write(canonical.dumps(doc))
    sys.exit(1)


def _load_kb_catalog(kb_path, catalog_path):
    catalog = load_catalog_file(catalog_path) if catalog_path else shipped_catalog()
    kb = load_kb_file(kb_path, catalog) if kb_path else shipped_kb()
    return kb, catalog


@click.group()
def main():
    """Design automation for model base management architectures."""


@main.command()
@click.option("--kb", "kb_path", type=click.Path(exists=True), default=None,
              help="Knowledge base archive (.mbkb); defaults to the starter pack.")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None,
              help="Catalog overlay (.mbcat); defaults to the shipped products.")
@click.option("--requirements", "req_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--force", is_flag=True, default=False,
              help="Generate even when validation reports mistakes.")
def design(kb_path, catalog_path, req_path, out_dir, force):
    """Run a requirements script end to end and write the scaffolding."""
    try:
        kb, catalog = _load_kb_catalog(kb_path, catalog_path)
        with open(req_path, "r", encoding="utf-8") as fh:
            raws = parse_requirements(fh.read())
        session = new_session(kb, catalog)
        for raw in raws:
            req = formalize(raw, session.next_req_id)
            outcome = submit_requirement(session, req)
            if outcome.status.state in ("missing_rule", "failed"):
                _fail_doc(outcome.status.to_doc())
            if outcome.status.state == "halted":
                break
        pd = project_description(session)
        report = validate(session.scheme, kb, catalog)
        if report.passed:
            pd = pd.with_validation("passed")
        elif force:
            pd = pd.with_validation("forced")
        else:
            _fail_doc(report.to_doc())
        fileset = generate_scaffold(pd, default_templates())
        write_fileset(fileset, out_dir)
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)
    click.echo(f"wrote {len(fileset.files)} files to {out_dir}")


@main.command()
@click.option("--kb", "kb_path", type=click.Path(exists=True), default=None)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
def repl(kb_path, catalog_path):
    """Interactive session: one statement per line, status echoed.

    Meta commands: :describe prints the manifest, :validate the current
    report, :retry reloads the knowledge base and retries a stalled
    requirement, :quit exits.
    """
    try:
        kb, catalog = _load_kb_catalog(kb_path, catalog_path)
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)
    session = new_session(kb, catalog)
    prompt = "> " if sys.stdin.isatty() else ""

    def echo(doc):
        sys.stdout.write(canonical.dumps_compact(doc) + "\n")
        sys.stdout.flush()

    while True:
        if prompt:
            sys.stdout.write(prompt)
            sys.stdout.flush()
        line = sys.stdin.readline()
        if not line:
            break
        line = line.strip()
        if not line:
            continue
        if line == ":quit":
            break
        try:
            if line == ":describe":
                echo(project_description(session).to_doc())
            elif line == ":validate":
                echo(validate(session.scheme, session.kb, catalog).to_doc())
            elif line == ":retry":
                kb, catalog = _load_kb_catalog(kb_path, catalog_path)
                outcome = retry_pending(session, kb)
                echo(outcome.status.to_doc())
            elif line.startswith(":"):
                echo({"error": "unknown_command", "detail": line})
            else:
                raws = parse_requirements(line)
                for raw in raws:
                    req = formalize(raw, session.next_req_id)
                    outcome = submit_requirement(session, req)
                    echo(outcome.status.to_doc())
        except DesignError as err:
            echo(err.to_doc())
    sys.exit(0)


@main.command("validate")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--kb", "kb_path", type=click.Path(exists=True), default=None)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
def validate_cmd(manifest_path, kb_path, catalog_path):
    """Check a manifest's scheme against the knowledge base frames."""
    try:
        kb, catalog = _load_kb_catalog(kb_path, catalog_path)
        with open(manifest_path, "rb") as fh:
            pd = parse_manifest(fh.read())
        scheme = pd.scheme()
        scheme.validate(catalog)
        report = validate(scheme, kb, catalog)
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)
    sys.stdout.write(canonical.dumps(report.to_doc()))
    sys.exit(0 if report.passed else 1)


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--kb", "kb_path", type=click.Path(exists=True), default=None)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--force", is_flag=True, default=False)
def generate(manifest_path, out_dir, kb_path, catalog_path, force):
    """Generate scaffolding from a manifest, validating it first."""
    try:
        kb, catalog = _load_kb_catalog(kb_path, catalog_path)
        with open(manifest_path, "rb") as fh:
            pd = parse_manifest(fh.read())
        if not pd.stamped():
            scheme = pd.scheme()
            scheme.validate(catalog)
            report = validate(scheme, kb, catalog)
            if report.passed:
                pd = pd.with_validation("passed")
            elif force:
                pd = pd.with_validation("forced")
            else:
                _fail_doc(report.to_doc())
        fileset = generate_scaffold(pd, default_templates())
        write_fileset(fileset, out_dir)
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)
    click.echo(f"wrote {len(fileset.files)} files to {out_dir}")


@main.group()
def kb():
    """Knowledge base editing."""


@kb.command("add-rule")
@click.option("--kb", "kb_path", type=click.Path(exists=True), required=True)
@click.option("--rule-file", "rule_path", type=click.Path(exists=True), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
def kb_add_rule(kb_path, rule_path, catalog_path):
    """Append a rule from a canonical rule document."""
    try:
        catalog = load_catalog_file(catalog_path) if catalog_path else shipped_catalog()
        base = load_kb_file(kb_path, catalog)
        with open(rule_path, "rb") as fh:
            rule = ProductionRule.from_doc(canonical.loads(fh.read()))
        updated = add_rule(base, rule)
        save_kb(updated, kb_path)
        for note in kb_warnings(updated):
            sys.stderr.write(note + "\n")
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)
    click.echo(f"rule {rule.id} added; knowledge base version {updated.version}")


@kb.command("link")
@click.option("--kb", "kb_path", type=click.Path(exists=True), required=True)
@click.option("--rule", "rule_id", required=True)
@click.option("--units", "units_csv", required=True,
              help="Comma-separated unit ids.")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
def kb_link(kb_path, rule_id, units_csv, catalog_path):
    """Link a rule to the catalog units it concerns."""
    try:
        catalog = load_catalog_file(catalog_path) if catalog_path else shipped_catalog()
        base = load_kb_file(kb_path, catalog)
        units = [u.strip() for u in units_csv.split(",") if u.strip()]
        updated = link_rule_to_units(base, Sym(rule_id), units, catalog)
        save_kb(updated, kb_path)
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)
    click.echo(f"rule {rule_id} linked to {len(units)} units; version {updated.version}")


@kb.command("export")
@click.option("--kb", "kb_path", type=click.Path(exists=True), required=True)
@click.option("--select", "selector", required=True,
              help='"all", "capabilities=a,b" or "rules=x,y".')
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
def kb_export(kb_path, selector, out_path, catalog_path):
    """Export a knowledge base subset as a new archive."""
    try:
        catalog = load_catalog_file(catalog_path) if catalog_path else shipped_catalog()
        base = load_kb_file(kb_path, catalog)
        if selector == "all":
            archive = export_subset(base, select_all=True)
        elif selector.startswith("capabilities="):
            caps = [c.strip() for c in selector[len("capabilities="):].split(",") if c.strip()]
            archive = export_subset(base, capabilities=caps)
        elif selector.startswith("rules="):
            ids = [r.strip() for r in selector[len("rules="):].split(",") if r.strip()]
            archive = export_subset(base, rule_ids=ids)
        else:
            raise EmptySelection(f"unrecognized selector: {selector!r}")
        with open(out_path, "wb") as fh:
            fh.write(archive)
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)
    click.echo(f"exported archive to {out_path}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
def serve(config_path):
    """Run the HTTP service."""
    from .service import ServiceConfig, serve_http

    try:
        with open(config_path, "rb") as fh:
            config = ServiceConfig.from_doc(canonical.loads(fh.read()))
        serve_http(config)
    except DesignError as err:
        _fail(err)
    except OSError as err:
        _fail_io(err)


if __name__ == "__main__":
    main()
