"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v` (or the whole suite); the
PASS/FAIL lines print straight to the terminal, bypassing capture.
"""

import contextlib
import io
import json
import os
import random
import socket
import subprocess
import sys
import threading
import time
import zipfile

import pytest

from bruteforce import naive_fixpoint, random_confluent_ruleset
from conftest import run_script
from mbmsdesign import canonical
from mbmsdesign.codegen import canonical_manifest
from mbmsdesign.engine import (
    new_session,
    project_description,
    run_to_fixpoint,
    trace_doc,
)
from mbmsdesign.errors import CyclicInheritance, ParseError
from mbmsdesign.facts import Fact, Pattern, Sym
from mbmsdesign.frames import Frame, resolve_frame
from mbmsdesign.kb import KnowledgeBase, export_subset, load_kb
from mbmsdesign.reqdsl import parse_requirements, pretty_print
from mbmsdesign.shipped import LP_SESSION_SCRIPT, write_data_files
from mbmsdesign.validator import validate
from test_frames import frame_map, random_hierarchy
from test_reqdsl import random_statement
from test_validator import REQUIRED_KINDS, drop_kind


@contextlib.contextmanager
def announce(capsys, number, title):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"[acceptance {number}] FAIL: {title}")
        raise
    with capsys.disabled():
        print(f"[acceptance {number}] PASS: {title}")


def test_criterion_1_golden_scenario(kb, catalog, capsys):
    with announce(capsys, 1, "golden scenario builds the reference scheme"):
        started = time.perf_counter()
        session, outcomes = run_script(kb, catalog, LP_SESSION_SCRIPT)
        report = validate(session.scheme, kb, catalog)
        elapsed = time.perf_counter() - started

        assert session.status.state == "halted"
        kind_counts = {}
        for inst in session.scheme.instances:
            kind = catalog.unit(inst.unit_id).kind
            kind_counts[kind] = kind_counts.get(kind, 0) + 1
        assert kind_counts == {
            "model_base": 1,
            "model_directory": 1,
            "model_dev_env": 1,
            "model_runtime": 1,
            "data_mgmt_link": 1,
            "knowledge_mgmt_link": 1,
            "dss_user_interface": 1,
            "solver": 1,
            "external_system": 1,
        }
        external = next(
            i
            for i in session.scheme.instances
            if catalog.unit(i.unit_id).kind == "external_system"
        )
        assert catalog.unit(external.unit_id).origin == "LINDO API"
        assert report.passed is True
        assert len(report.mistakes) == 0
        assert elapsed < 2.0, f"golden scenario took {elapsed:.3f}s"


def test_criterion_2_determinism(kb, catalog, tmp_path, capsys):
    with announce(capsys, 2, "100 runs give bit-identical manifests and traces"):
        def one_run():
            session, _ = run_script(kb, catalog, LP_SESSION_SCRIPT)
            pd = project_description(session).with_validation("passed")
            return canonical_manifest(pd), canonical.encode(trace_doc(session))

        baseline_manifest, baseline_trace = one_run()
        for _ in range(99):
            manifest, trace = one_run()
            assert manifest == baseline_manifest
            assert trace == baseline_trace

        # Separate interpreter processes with different hash seeds stand in
        # for distinct platforms.
        write_data_files(str(tmp_path))
        driver = (
            "import sys\n"
            "from mbmsdesign.shipped import shipped_kb, shipped_catalog, LP_SESSION_SCRIPT\n"
            "from mbmsdesign.reqdsl import parse_requirements, formalize\n"
            "from mbmsdesign.engine import new_session, submit_requirement, project_description\n"
            "from mbmsdesign.codegen import canonical_manifest\n"
            "kb, cat = shipped_kb(), shipped_catalog()\n"
            "s = new_session(kb, cat)\n"
            "for raw in parse_requirements(LP_SESSION_SCRIPT):\n"
            "    submit_requirement(s, formalize(raw, s.next_req_id))\n"
            "pd = project_description(s).with_validation('passed')\n"
            "sys.stdout.buffer.write(canonical_manifest(pd))\n"
        )
        for seed in ("0", "1", "31337"):
            env = dict(os.environ, PYTHONHASHSEED=seed)
            run = subprocess.run(
                [sys.executable, "-c", driver],
                capture_output=True,
                env=env,
                timeout=120,
            )
            assert run.returncode == 0, run.stderr.decode()
            assert run.stdout == baseline_manifest, f"hash seed {seed} diverged"


def test_criterion_3_fixpoint_oracle_equivalence(catalog, capsys):
    with announce(capsys, 3, "engine matches the naive fixpoint oracle"):
        started = time.perf_counter()
        rng = random.Random(20250809)
        confluent_checked = 0
        while confluent_checked < 200:
            rules, seeds = random_confluent_ruleset(
                rng,
                entities=["e1", "e2", "e3"],
                attributes=["a1", "a2"],
                symbols=["s1", "s2", "s3"],
                n_rules=rng.randint(1, 5),
                n_facts=rng.randint(1, 15),
            )
            kb = KnowledgeBase(rules=tuple(rules), meta=(("confluent", "true"),))
            session = new_session(kb, catalog)
            for f in sorted(seeds, key=Fact.sort_key):
                session.assert_fact(f)
            firings, _ = run_to_fixpoint(session)
            assert set(session.wm) == naive_fixpoint(rules, seeds)
            pairs = {(f.rule_id, f.bindings) for f in firings}
            assert len(firings) == len(pairs), "a rule/bindings pair fired twice"
            distinct_bindings = {f.bindings for f in firings}
            assert len(firings) <= max(1, len(rules)) * max(1, len(distinct_bindings))
            confluent_checked += 1

        # Rule sets with negation are not flagged confluent; the
        # refractoriness bound must still hold for them.
        for _ in range(40):
            rules, seeds = random_confluent_ruleset(
                rng,
                entities=["e1", "e2"],
                attributes=["a1", "a2"],
                symbols=["s1", "s2"],
                n_rules=rng.randint(1, 4),
                n_facts=rng.randint(1, 10),
            )
            guarded = []
            for rule in rules:
                if rng.random() < 0.5:
                    from dataclasses import replace

                    guard = Pattern(
                        Sym(rng.choice(["e1", "e2"])),
                        Sym("a1"),
                        Sym(rng.choice(["s1", "s2"])),
                        negated=True,
                    )
                    rule = replace(rule, conditions=rule.conditions + (guard,))
                guarded.append(rule)
            kb = KnowledgeBase(rules=tuple(guarded))
            session = new_session(kb, catalog)
            for f in sorted(seeds, key=Fact.sort_key):
                session.assert_fact(f)
            firings, _ = run_to_fixpoint(session)
            pairs = {(f.rule_id, f.bindings) for f in firings}
            assert len(firings) == len(pairs)

        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"oracle comparison took {elapsed:.1f}s"


def test_criterion_4_missing_rule_loop(tmp_path, capsys):
    with announce(capsys, 4, "missing-rule recovery via kb add-rule, kb link, retry"):
        write_data_files(str(tmp_path))
        kb_path = tmp_path / "starter.mbkb"
        catalog_path = tmp_path / "external_products.mbcat"
        rule_doc = {
            "id": "select_ga_solver",
            "salience": 40,
            "conditions": [
                {
                    "entity": {"var": "r"},
                    "attribute": {"symbol": "kind"},
                    "value": {"symbol": "method_requirement"},
                    "negated": False,
                },
                {
                    "entity": {"var": "r"},
                    "attribute": {"symbol": "method"},
                    "value": {"symbol": "genetic_algorithm"},
                    "negated": False,
                },
                {
                    "entity": {"var": "mr"},
                    "attribute": {"symbol": "instance_of"},
                    "value": {"symbol": "unit_model_runtime"},
                    "negated": False,
                },
            ],
            "actions": [
                {"op": "instantiate", "unit": "unit_genetic_solver", "as": "s"},
                {
                    "op": "connect",
                    "from": {"var": "mr"},
                    "from_port": "solver_port",
                    "to": {"var": "s"},
                    "to_port": "solve_api",
                },
                {
                    "op": "assert",
                    "entity": {"var": "r"},
                    "attribute": {"symbol": "status"},
                    "value": {"symbol": "consumed"},
                },
            ],
            "linked_units": [],
            "doc": "",
        }
        rule_path = tmp_path / "ga.json"
        rule_path.write_bytes(canonical.encode(rule_doc))

        proc = subprocess.Popen(
            [
                sys.executable, "-m", "mbmsdesign.cli", "repl",
                "--kb", str(kb_path), "--catalog", str(catalog_path),
            ],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
        )
        try:
            proc.stdin.write("goal lp_dss\n")
            proc.stdin.flush()
            first = json.loads(proc.stdout.readline())
            assert first["status"] == "awaiting_requirement"
            proc.stdin.write("require method genetic_algorithm\n")
            proc.stdin.flush()
            stalled = json.loads(proc.stdout.readline())
            assert stalled == {"requirement": "r2", "status": "missing_rule"}

            def cli(*args):
                return subprocess.run(
                    [sys.executable, "-m", "mbmsdesign.cli", *args],
                    capture_output=True,
                    text=True,
                    timeout=120,
                )

            added = cli("kb", "add-rule", "--kb", str(kb_path),
                        "--rule-file", str(rule_path), "--catalog", str(catalog_path))
            assert added.returncode == 0, added.stderr
            linked = cli("kb", "link", "--kb", str(kb_path),
                         "--rule", "select_ga_solver",
                         "--units", "unit_genetic_solver",
                         "--catalog", str(catalog_path))
            assert linked.returncode == 0, linked.stderr

            proc.stdin.write(":retry\n")
            proc.stdin.flush()
            retried = json.loads(proc.stdout.readline())
            assert retried == {"status": "awaiting_requirement"}

            proc.stdin.write(":describe\n")
            proc.stdin.flush()
            description = json.loads(proc.stdout.readline())
            solvers = [
                i for i in description["instances"]
                if i["kind"] == "solver" and i["unit"] == "unit_genetic_solver"
            ]
            assert len(solvers) == 1, "retry must add exactly one new solver"
            proc.stdin.write(":quit\n")
            proc.stdin.flush()
            assert proc.wait(timeout=60) == 0
        finally:
            proc.kill()


def test_criterion_5_validator_mutation_suite(golden_session, kb, catalog, capsys):
    with announce(capsys, 5, "one missing-unit mistake per deleted required kind"):
        for kind in REQUIRED_KINDS:
            mutated = drop_kind(golden_session.scheme, catalog, kind)
            report = validate(mutated, kb, catalog)
            assert len(report.mistakes) == 1, (kind, [m.to_doc() for m in report.mistakes])
            mistake = report.mistakes[0]
            assert mistake.code == "MISSING_REQUIRED_UNIT"
            assert mistake.subject == Sym(f"{kind}_count")


def test_criterion_6_parser_roundtrip(capsys):
    with announce(capsys, 6, "1000 generated scripts round-trip; error spans in bounds"):
        rng = random.Random(424242)
        for _ in range(1000):
            statements = [random_statement(rng) for _ in range(rng.randint(0, 8))]
            printed = pretty_print(statements)
            assert parse_requirements(printed) == statements

        corruptions = ["\x7f", "goal", '"', "require model swift x", "=", "9bad"]
        checked_errors = 0
        for _ in range(300):
            statements = [random_statement(rng) for _ in range(rng.randint(0, 4))]
            text = pretty_print(statements)
            insert_at = rng.randint(0, len(text))
            corrupted = text[:insert_at] + rng.choice(corruptions) + text[insert_at:]
            try:
                parse_requirements(corrupted)
            except ParseError as err:
                checked_errors += 1
                lines = corrupted.split("\n")
                assert 1 <= err.line <= len(lines)
                assert 1 <= err.column <= len(lines[err.line - 1]) + 2
        assert checked_errors > 50


def test_criterion_7_subset_export_reproduces_manifest(kb, catalog, capsys):
    with announce(capsys, 7, "LP capability subset reproduces the golden manifest"):
        session, _ = run_script(kb, catalog, LP_SESSION_SCRIPT)
        full = canonical_manifest(project_description(session).with_validation("passed"))

        archive = export_subset(kb, capabilities={"linear_programming"})
        subset_kb = load_kb(archive, catalog)
        assert subset_kb is not kb and len(subset_kb.rules) < len(kb.rules)

        subset_session, _ = run_script(subset_kb, catalog, LP_SESSION_SCRIPT)
        subset = canonical_manifest(
            project_description(subset_session).with_validation("passed")
        )
        assert subset == full, "subset run must be byte-identical"


def test_criterion_8_frame_algebra(capsys):
    with announce(capsys, 8, "resolution idempotent on 500 acyclic, raises on cyclic"):
        rng = random.Random(88)
        for _ in range(500):
            frames = random_hierarchy(rng, rng.randint(1, 8))
            mapping = frame_map(*frames)
            target = rng.choice(frames).name
            once = resolve_frame(mapping, target)
            again = resolve_frame(frame_map(*frames, once), once.name)
            assert once == again

        for _ in range(100):
            n = rng.randint(2, 6)
            frames = random_hierarchy(rng, n)
            members = rng.sample(range(n), rng.randint(2, n))
            rebuilt = {}
            for i, frame in enumerate(frames):
                if i in members:
                    successor = members[(members.index(i) + 1) % len(members)]
                    frame = Frame(
                        name=frame.name,
                        kind=frame.kind,
                        isa=Sym(f"f{successor}"),
                        slots=frame.slots,
                    )
                rebuilt[frame.name] = frame
            with pytest.raises(CyclicInheritance):
                resolve_frame(rebuilt, Sym(f"f{members[0]}"))


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_criterion_9_cli_api_parity(tmp_path, golden_description, capsys):
    with announce(capsys, 9, "HTTP flow matches the CLI scaffold byte for byte"):
        write_data_files(str(tmp_path))
        out_dir = tmp_path / "cli_out"
        run = subprocess.run(
            [
                sys.executable, "-m", "mbmsdesign.cli", "design",
                "--kb", str(tmp_path / "starter.mbkb"),
                "--catalog", str(tmp_path / "external_products.mbcat"),
                "--requirements", str(tmp_path / "lp_session.req"),
                "--out", str(out_dir),
            ],
            capture_output=True,
            timeout=120,
        )
        assert run.returncode == 0, run.stderr.decode()

        import uvicorn
        import httpx

        from mbmsdesign.service import ServiceConfig, create_app

        port = _free_port()
        config = ServiceConfig(
            host="127.0.0.1",
            port=port,
            kb_path=str(tmp_path / "starter.mbkb"),
            catalog_path=str(tmp_path / "external_products.mbcat"),
        )
        server = uvicorn.Server(
            uvicorn.Config(
                create_app(config), host="127.0.0.1", port=port, log_level="error"
            )
        )
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        deadline = time.time() + 15
        while not server.started:
            assert time.time() < deadline, "server did not start"
            time.sleep(0.02)
        try:
            base = f"http://127.0.0.1:{port}"
            with httpx.Client(base_url=base, timeout=30) as client:
                sid = client.post("/sessions").json()["session"]
                for statement in (
                    "goal lp_dss",
                    "require model operational production_plan",
                    "require method simplex",
                    "require solver linear_programming",
                    'integrate external solver "LINDO API"',
                    "done",
                ):
                    response = client.post(
                        f"/sessions/{sid}/requirements",
                        json={"statement": statement},
                    )
                    assert response.status_code == 200, response.text
                zip_response = client.post(f"/sessions/{sid}/generate")
                assert zip_response.status_code == 200
        finally:
            server.should_exit = True
            thread.join(timeout=15)

        with zipfile.ZipFile(io.BytesIO(zip_response.content)) as zf:
            names = zf.namelist()
            cli_files = {}
            for root, _, files in os.walk(out_dir):
                for name in files:
                    full = os.path.join(root, name)
                    rel = os.path.relpath(full, out_dir).replace(os.sep, "/")
                    cli_files[rel] = open(full, "rb").read()
            assert sorted(names) == sorted(cli_files)
            for name in names:
                assert zf.read(name) == cli_files[name], f"{name} differs over HTTP"
