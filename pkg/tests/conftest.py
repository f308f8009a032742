from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from logiplan.dabstep import generate_fixture, write_fixture  # noqa: E402
from logiplan.logic import KnowledgeBase  # noqa: E402
from logiplan.tools import ToolEnv, ToolRegistry  # noqa: E402

SEED = 7


@pytest.fixture(scope="session")
def dataset():
    return generate_fixture(SEED, 1000)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixture")
    write_fixture(d, SEED, 1000)
    return d


@pytest.fixture(scope="session")
def registry():
    return ToolRegistry.load()


@pytest.fixture
def bound_kb(dataset, registry, tmp_path):
    kb = KnowledgeBase()
    dataset.assert_facts(kb)
    registry.bind(kb, ToolEnv.for_dataset(dataset, tmp_path / "out"))
    return kb


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
