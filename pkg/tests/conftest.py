import json

import pytest

_RESULTS: dict[int, dict] = {}


class AcceptanceRecorder:
    def record(self, number: int, passed: bool, title: str, **details) -> bool:
        _RESULTS[number] = {"passed": bool(passed), "title": title, **details}
        return bool(passed)


@pytest.fixture
def acceptance():
    return AcceptanceRecorder()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        r = _RESULTS[n]
        extra = {k: v for k, v in r.items() if k not in ("passed", "title") and not isinstance(v, (list, dict))}
        detail = " ".join(f"{k}={_fmt(v)}" for k, v in extra.items())
        tr.write_line(f"[{'PASS' if r['passed'] else 'FAIL'}] criterion {n:2d}: {r['title']}  {detail}")
    path = config.rootpath / "acceptance_report.json"
    path.write_text(json.dumps({str(k): v for k, v in sorted(_RESULTS.items())}, indent=1, default=str) + "\n")
    tr.write_line(f"full report: {path}")
