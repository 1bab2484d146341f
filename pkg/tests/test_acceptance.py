"""The thirteen acceptance criteria, each checked exactly and against its time bound."""

import pytest

from fsetmag.acceptance import CRITERIA, run


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number, report_line):
    outcome = run(number)
    report_line(outcome.line())
    print(outcome.line())
    assert outcome.passed, outcome.detail
    assert outcome.seconds < outcome.bound, f"{outcome.seconds:.3f}s exceeds {outcome.bound}s"
