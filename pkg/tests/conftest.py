import sys
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=150,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = resources.files("debreach") / "data"
CORPUS = Path(__file__).parent / "data" / "corpus"


@pytest.fixture
def fig2_text():
    return (DATA / "fig2.facts").read_text()


@pytest.fixture
def fig8_texts():
    return (DATA / "fig8.facts").read_text(), (DATA / "fig8.derived").read_text()


@pytest.fixture(scope="session")
def corpus_files():
    return sorted(p for p in CORPUS.iterdir() if p.is_file())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
