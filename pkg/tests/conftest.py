import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from repmix import StudySummary, VagueComponent, load_labels  # noqa: E402


@pytest.fixture(scope="session")
def labels():
    return load_labels()


@pytest.fixture(scope="session")
def original(labels):
    return labels.original


@pytest.fixture(scope="session")
def reps(labels):
    return labels.replications


@pytest.fixture
def vague():
    return VagueComponent(0.0, 2.0)


@pytest.fixture(scope="session")
def labels_csv_path():
    return str(Path(__file__).parents[1] / "src" / "repmix" / "datasets" / "labels.csv")


def study(x, s, label="r"):
    return StudySummary(label, x, s)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
