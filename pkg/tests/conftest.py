"""Prints one PASS/FAIL line per acceptance criterion at the end of a run."""

import re

CRITERIA = {
    1: "worked example under the modular hash, r = 7",
    2: "collision obstruction, 20 planted (r, g) pairs",
    3: "soundness of NONZERO verdicts on 500 instances",
    4: "completeness census, w=10 n=20 d=2 r=10007, 600 g x 5",
    5: "word-algebra property suite, 1000 cases",
    6: "constraint degree budgets, 600 pencils",
    7: "Kronecker injectivity, finite avoidance, hitting-set sizes",
    8: "curve pipeline end to end, 100 instances",
    9: "degeneracy findings and fullness-witness soundness",
    10: "linear scaling of modular evaluation in n",
}

_outcomes = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        prev = _outcomes.get(num, "PASS")
        _outcomes[num] = "PASS" if (report.passed and prev == "PASS") else ("SKIP" if report.skipped else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        status = _outcomes.get(num, "NOT RUN")
        terminalreporter.write_line(f"criterion {num:2d}: {status:7s} {CRITERIA[num]}")
