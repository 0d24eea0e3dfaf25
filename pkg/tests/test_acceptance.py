"""One test per acceptance criterion, each printing a single PASS/FAIL line.

The checks live in ``twistdiff.verification`` so that ``twistdiff verify``
and this file run the same seeded cases on the reference configuration.
"""

import json

import pytest

from twistdiff.cli import main
from twistdiff.verification import CRITERIA, Setting

RESULTS: dict = {}


@pytest.fixture(scope="module")
def setting():
    return Setting()


def _run(n, setting):
    res = CRITERIA[n](setting)
    RESULTS[n] = res.line()
    print(res.line())
    return res


@pytest.mark.parametrize("n", range(1, 12), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(n, setting):
    res = _run(n, setting)
    assert res.ok, res.failures


def test_criterion_12_round_trip_and_verify_all(setting, capsys):
    res = CRITERIA[12](setting)
    code = main(["--format", "json", "verify", "all"])
    report = json.loads(capsys.readouterr().out)["report"]
    ok = res.ok and code == 0 and report["failed"] == 0 and report["passed"] == 12
    line = res.line() + f"; verify all exit {code}"
    if not ok and res.ok:
        line = line.replace("[PASS]", "[FAIL]")
    RESULTS[12] = line
    print(line)
    assert ok, (res.failures, report)
