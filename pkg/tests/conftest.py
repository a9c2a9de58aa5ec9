import os

import pytest
from hypothesis import settings

from youngmod.cli import RunConfig, Workbench

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance.py
RESULTS = {}


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    env = os.environ.get("YOUNGMOD_CACHE")
    return env if env else str(tmp_path_factory.mktemp("cache"))


@pytest.fixture(scope="session")
def bench(cache_dir):
    """One workbench for the whole session, so every catalog and algebra is built once."""
    return Workbench(RunConfig(n=7, cache_dir=cache_dir))


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
