"""Collects one pass/fail line per acceptance criterion."""

RESULTS: dict[int, tuple[bool, str]] = {}


def report(number: int, ok: bool, detail: str, elapsed: float, limit: float | None):
    timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit is not None else "")
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}  [{timing}]"
    RESULTS[number] = (ok, line)
    print(line)


def lines():
    return [RESULTS[k][1] for k in sorted(RESULTS)]
