import os

from mbmsdesign import canonical
from mbmsdesign.facts import Sym
from mbmsdesign.kb import kb_warnings
from mbmsdesign.shipped import (
    LP_SESSION_SCRIPT,
    roundtrip_check,
    shipped_catalog_bytes,
    shipped_kb,
    shipped_kb_bytes,
)

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "mbmsdesign", "data")


def read(name):
    with open(os.path.join(DATA_DIR, name), "rb") as fh:
        return fh.read()


def test_committed_kb_file_matches_constructor():
    assert read("starter.mbkb") == shipped_kb_bytes()


def test_committed_catalog_file_matches_constructor():
    assert read("external_products.mbcat") == shipped_catalog_bytes()


def test_committed_script_matches_constant():
    assert read("lp_session.req").decode("utf-8") == LP_SESSION_SCRIPT


def test_shipped_kb_archive_revalidates():
    assert roundtrip_check() == shipped_kb()


def test_shipped_kb_lints_clean():
    assert kb_warnings(shipped_kb()) == []


def test_every_rule_is_linked_to_units_it_builds(kb):
    for rule in kb.rules:
        for action in rule.actions:
            if action.to_doc().get("op") == "instantiate":
                assert Sym(action.to_doc()["unit"]) in rule.linked_units, rule.id


def test_lp_rules_mention_the_capability(kb):
    lp = Sym("linear_programming")
    golden_rules = {
        "bootstrap_core",
        "register_model",
        "map_simplex_method",
        "select_lp_solver",
        "integrate_lindo_api",
        "finish_design",
    }
    for rule in kb.rules:
        assert rule.mentions(lp) == (str(rule.id) in golden_rules), rule.id


def test_kb_doc_is_canonical_bytes():
    data = shipped_kb_bytes()
    assert data == canonical.encode(canonical.loads(data))
