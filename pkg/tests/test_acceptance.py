"""Acceptance criteria 1-9 at their stated tolerances; one PASS/FAIL line per criterion."""

import pytest

from cuspkit.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.details
