"""One summary line per acceptance criterion, printed at the end of the run."""

from __future__ import annotations

LINES: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES[number] = line
    print(line)
