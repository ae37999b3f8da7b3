import helpers


def pytest_terminal_summary(terminalreporter):
    if not helpers.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(helpers.RESULTS):
        title, ok, detail = helpers.RESULTS[n]
        line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title}"
        terminalreporter.write_line(line + (f" [{detail}]" if detail else ""))
