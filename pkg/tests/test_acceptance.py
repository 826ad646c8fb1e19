"""Every acceptance criterion, one pass/fail line each.

The criteria live in polynov.acceptance so that the `demo` subcommand and
this suite run exactly the same computations at the same tolerances (all
exact; the randomized ones are seeded and deterministic).
"""

import pytest

from polynov import acceptance


@pytest.mark.parametrize(
    "criterion", acceptance.CRITERIA, ids=[c.ident for c in acceptance.CRITERIA]
)
def test_criterion(criterion):
    ok, detail = acceptance.run_criterion(criterion)
    print(("PASS " if ok else "FAIL ") + criterion.ident + ": " + detail)
    assert ok, f"{criterion.ident}: {detail}"


def test_criteria_are_complete_and_distinct():
    idents = [c.ident for c in acceptance.CRITERIA]
    assert len(idents) == 12
    assert len(set(idents)) == 12
