import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_report  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if acceptance_report.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report.lines():
            terminalreporter.write_line(line)
