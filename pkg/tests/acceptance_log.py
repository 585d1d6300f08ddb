"""Shared registry of acceptance verdicts, printed in the terminal summary."""

RESULTS = {}


def record(criterion, verdict, detail):
    RESULTS[criterion] = f"criterion {criterion}: {verdict} - {detail}"
    print(RESULTS[criterion])
