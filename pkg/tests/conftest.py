import time

import pytest

RESULTS = []


class Criterion:
    """Times a numbered criterion and records one pass/fail line for the summary."""

    def __init__(self, n, title, limit):
        self.n, self.title, self.limit = n, title, limit
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        slow = dt > self.limit
        ok = exc_type is None and not slow
        why = "" if ok else (f" ({exc_type.__name__}: {exc})" if exc_type else f" (over {self.limit}s)")
        extra = f" [{'; '.join(self.notes)}]" if self.notes else ""
        line = f"criterion {self.n:2d} {'PASS' if ok else 'FAIL'} {dt:6.2f}s  {self.title}{extra}{why}"
        print(line)
        RESULTS.append((self.n, line))
        if exc_type is None and slow:
            pytest.fail(f"criterion {self.n} took {dt:.2f}s, limit {self.limit}s")
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(RESULTS):
            terminalreporter.write_line(line)
