import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
    deadline=None,
)
settings.load_profile("suite")

from mbmsdesign.engine import new_session, project_description, submit_requirement
from mbmsdesign.reqdsl import formalize, parse_requirements
from mbmsdesign.shipped import LP_SESSION_SCRIPT, shipped_catalog, shipped_kb


@pytest.fixture(scope="session")
def kb():
    return shipped_kb()


@pytest.fixture(scope="session")
def catalog():
    return shipped_catalog()


def run_script(kb, catalog, script):
    session = new_session(kb, catalog)
    outcomes = []
    for raw in parse_requirements(script):
        req = formalize(raw, session.next_req_id)
        outcomes.append(submit_requirement(session, req))
    return session, outcomes


@pytest.fixture()
def golden_session(kb, catalog):
    session, outcomes = run_script(kb, catalog, LP_SESSION_SCRIPT)
    assert session.status.state == "halted"
    return session


@pytest.fixture()
def golden_description(golden_session):
    return project_description(golden_session).with_validation("passed")
