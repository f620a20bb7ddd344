from __future__ import annotations

import sys
import time
from contextlib import contextmanager
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

RESULTS: dict[int, tuple[str, str, float]] = {}


@contextmanager
def criterion(n: int, title: str):
    """Record a pass/fail line for acceptance criterion n."""
    t0 = time.perf_counter()
    status = "FAIL"
    try:
        yield
        status = "PASS"
    finally:
        dt = time.perf_counter() - t0
        RESULTS[n] = (status, title, dt)
        print(f"criterion {n:2d}: {status}  {title}  ({dt:.1f} s)", file=sys.__stdout__, flush=True)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        status, title, dt = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title}  ({dt:.1f} s)")
