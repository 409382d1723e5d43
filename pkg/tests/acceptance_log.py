"""Collects one verdict line per acceptance criterion for the terminal summary."""

LINES: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES[num] = line
    print(line)
    return ok
