"""Shared PASS/FAIL registry for the acceptance criteria."""

RESULTS: dict = {}


def record(criterion, title, ok, detail=""):
    RESULTS[str(criterion)] = (bool(ok), title, detail)


def _order(key):
    digits = "".join(ch for ch in key if ch.isdigit())
    return int(digits), key


def print_report(write):
    for key in sorted(RESULTS, key=_order):
        ok, title, detail = RESULTS[key]
        write(f"{'PASS' if ok else 'FAIL'} criterion {key}: {title} -- {detail}")
