import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).parents[1] / "demos" / "data"

# filled by test_acceptance, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
