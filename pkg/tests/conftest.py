"""Shared pytest wiring: collects the acceptance-gate lines and prints
them as a summary block, where file-descriptor capture cannot swallow
them."""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.write_sep("-", "acceptance report")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
