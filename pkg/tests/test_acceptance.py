"""The nine acceptance criteria, each at its stated time limit.

Run with ``pytest -s tests/test_acceptance.py`` to see one line per criterion.
"""

import io

import pytest

from unwindlab.cli import run_command
from unwindlab.suites import CRITERIA, run_criterion


@pytest.mark.parametrize("c", CRITERIA, ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_criterion(c):
    r = run_criterion(c)
    elapsed = r.details.get("elapsed", float("nan"))
    status = "PASS" if r.ok else "FAIL"
    print(f"\n{status} criterion {c.number} ({c.title}): {elapsed:.2f} s of {c.limit} s"
          + ("" if r.ok else f" -- {r.witness}"))
    if not r.ok:
        for sub in r.details.get("subchecks", []):
            if not sub.ok:
                print("  " + sub.line())
    assert r.ok, r.witness
    assert elapsed < c.limit


def test_verify_all_through_the_cli():
    out, err = io.StringIO(), io.StringIO()
    code = run_command(["verify", "all"], out, err)
    lines = out.getvalue().splitlines()
    print("\n" + "\n".join(lines))
    assert code == 0
    assert len(lines) == len(CRITERIA) and all(l.startswith("PASS") for l in lines)
