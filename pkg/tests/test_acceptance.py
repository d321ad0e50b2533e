from __future__ import annotations

import pytest

from hyperpowers.acceptance import ALL_CHECKS


@pytest.mark.parametrize("check", ALL_CHECKS, ids=lambda c: f"{c.number:02d}-{c.check_name}")
def test_acceptance_criterion(check, capsys):
    result = check(seed=0)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
