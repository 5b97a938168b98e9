import _acceptance_log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance_log.LINES):
        terminalreporter.write_line(line)
