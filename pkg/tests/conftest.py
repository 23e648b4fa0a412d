_REPORT = []


def record_criteria(results):
    _REPORT[:] = results


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    from nanopore1d.validation import format_report

    terminalreporter.section("acceptance criteria")
    for line in format_report(_REPORT).splitlines():
        terminalreporter.write_line(line)
