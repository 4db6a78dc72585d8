"""Full acceptance suite: seven criteria at full scale, exact arithmetic throughout.

Each test prints one ``[PASS]``/``[FAIL]`` line for its criterion, with the
counts and wall time against the criterion's budget.
"""

from __future__ import annotations

import pytest

from exactsparse.acceptance import CRITERIA, SUITES, run_acceptance, run_criterion

NAMES = {
    1: "cut exactness of signature contraction",
    2: "basic-star construction",
    3: "flow exactness with negative control",
    4: "demand splitting",
    5: "vertex cover and vertex integrity",
    6: "treewidth reduction",
    7: "oracle self-consistency",
}


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion-{n}")
def test_criterion(number, capsys):
    res = run_criterion(number)
    with capsys.disabled():
        print(f"\n{res.line()}  [{NAMES[number]}]")
        for f in res.failures:
            print(f"    {f}")
    assert res.passed, "\n".join(res.failures)


@pytest.mark.parametrize("number", [1, 3])
def test_fault_injection_is_detected(number):
    res = run_criterion(number, scale=0.05, fault_injection=True)
    assert not res.passed
    assert res.failures


def test_flow_fault_report_names_lambda_values():
    res = run_criterion(3, scale=0.05, fault_injection=True)
    assert any("lambda_G=" in f and "lambda_H=" in f for f in res.failures)


def test_suites_cover_every_criterion():
    assert sorted(SUITES["all"]) == sorted(CRITERIA) == list(range(1, 8))
    covered = {n for name, nums in SUITES.items() if name != "all" for n in nums}
    assert covered == set(CRITERIA)


def test_report_aggregates_and_echoes():
    lines = []
    report = run_acceptance("treewidth", scale=0.1, echo=lines.append)
    assert report.passed
    assert lines == report.lines()
    with pytest.raises(ValueError):
        run_acceptance("nope")
