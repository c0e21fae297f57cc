"""The nine acceptance criteria, one test each.

Every test prints a single ``[PASS]`` or ``[FAIL]`` line so the log of a
full ``pytest -v`` run doubles as the acceptance report.
"""

import pytest

from bitbound.acceptance import CRITERIA, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("cid", sorted(CRITERIA), ids=lambda c: f"criterion_{c}")
def test_acceptance_criterion(cid, capsys):
    result = run_criterion(cid)
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert result.ok, result.detail.get("failures") or result.detail
