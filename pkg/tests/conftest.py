import sys
from pathlib import Path

# make the shared strategies importable as a plain module
sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.REPORT:
        terminalreporter.write_line(line)
