import contextlib
import time

import pytest

_CRITERIA: list[str] = []


class _Check:
    def __init__(self):
        self.notes: list[str] = []

    def require(self, cond, msg):
        if not cond:
            raise AssertionError(msg)

    def note(self, msg):
        self.notes.append(msg)


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def run(number, title, limit=None):
        check = _Check()
        start = time.perf_counter()
        try:
            yield check
            elapsed = time.perf_counter() - start
            if limit is not None:
                check.require(elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s")
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            _CRITERIA.append(f"[FAIL] {number:>2}. {title} ({elapsed:.2f} s): {exc}")
            raise
        detail = "; ".join(check.notes)
        _CRITERIA.append(f"[PASS] {number:>2}. {title} ({elapsed:.2f} s)" + (f": {detail}" if detail else ""))

    return run


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)
