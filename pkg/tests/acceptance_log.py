"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

import contextlib
import time

LINES = []


@contextlib.contextmanager
def criterion(number, title):
    """Record PASS when the block finishes, FAIL (with the reason) when it raises."""
    notes = []
    start = time.perf_counter()
    try:
        yield notes
    except BaseException as exc:
        reason = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        line = f"criterion {number} FAIL  {title}: {reason}"
        LINES.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    detail = "; ".join(notes)
    line = f"criterion {number} PASS  {title} ({elapsed:.1f} s){': ' + detail if detail else ''}"
    LINES.append(line)
    print(line)
