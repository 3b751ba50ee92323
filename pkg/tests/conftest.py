from collections import OrderedDict

import pytest

_RESULTS: "OrderedDict[str, list]" = OrderedDict()


@pytest.fixture
def record():
    """Register a (criterion, case, passed, detail) outcome for the summary lines."""
    def _record(criterion: str, case: str, passed: bool, detail: str = ""):
        _RESULTS.setdefault(criterion, []).append((case, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit, cases in sorted(_RESULTS.items(), key=lambda kv: int(kv[0])):
        ok = all(p for _, p, _ in cases)
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}")
        for case, p, detail in cases:
            tr.write_line(f"    {'pass' if p else 'FAIL'}  {case}  {detail}")
