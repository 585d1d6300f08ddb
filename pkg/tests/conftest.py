from acceptance_log import RESULTS


def _order(key):
    key = str(key)
    num = "".join(c for c in key if c.isdigit())
    return int(num), key


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=_order):
        terminalreporter.write_line(RESULTS[key])
