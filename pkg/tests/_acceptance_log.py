"""Shared registry of acceptance-criterion outcomes.

test_acceptance records one line per criterion here; conftest prints the
collected lines in the terminal summary so they survive output capture.
"""

LINES: list[tuple[int, str]] = []


def record(num: int, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"criterion {num:2d}: {status}"
    if detail:
        line += f"  ({detail})"
    LINES.append((num, line))
    print(line, flush=True)
