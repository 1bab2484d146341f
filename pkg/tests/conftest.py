import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hypothesis import settings  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

acceptance_lines = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[acceptance_lines] = []


@pytest.fixture
def report_line(request):
    """Collects one summary line per acceptance criterion for the end of the run."""
    return request.config.stash[acceptance_lines].append


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(acceptance_lines, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
