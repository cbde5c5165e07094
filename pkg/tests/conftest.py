import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from gpdext import catalog
from gpdext.config import RunConfig

SEED = RunConfig.from_env().seed
FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repro")

_criteria: dict[int, tuple[str, str]] = {}


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def small():
    return catalog.small_groupoids()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    if rep.failed or rep.when == "call":
        if number not in _criteria or _criteria[number][1] == "PASS":
            _criteria[number] = (title, "FAIL" if rep.failed else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
