import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, tuple[bool, str, float]] = {}
_START = time.perf_counter()


def session_runtime() -> float:
    return time.perf_counter() - _START


@pytest.fixture
def criterion(request):
    """``criterion(n, ok, detail)`` records an acceptance line; runtime is the test's wall time."""
    t0 = time.perf_counter()

    def record(number: int, ok: bool, detail: str) -> bool:
        _RESULTS[number] = (bool(ok), detail, time.perf_counter() - t0)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        ok, detail, secs = _RESULTS[n]
        tr.write_line(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{secs:.2f}s]")
    total = session_runtime()
    tr.write_line(f"suite runtime {total:.1f}s (limit 120s): {'PASS' if total < 120 else 'FAIL'}")
