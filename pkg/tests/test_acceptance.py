"""Headline acceptance checks, one test per criterion.

Each test prints its criterion's PASS/FAIL line with the measured
numbers, then asserts the verdict.  Failing criteria are left failing:
the printed details record exactly what was measured and at which
tolerance the check was applied.  `rotorlab check` runs the same code.
"""

import pytest

from rotorlab import acceptance


@pytest.mark.parametrize("index", sorted(acceptance._CRITERIA))
def test_criterion(index, capsys):
    result = acceptance._CRITERIA[index]()
    with capsys.disabled():
        print()
        print(result.line())
    assert result.passed, result.line()
