import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, from the outcomes of test_acceptance."""
    lines = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_a" not in nodeid or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            name = nodeid.split("::")[1]
            crit = "A" + name[len("test_a"):].split("_")[0]
            ok = outcome == "passed"
            prev = lines.get(crit, True)
            lines[crit] = prev and ok
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(lines, key=lambda c: int(c[1:])):
        terminalreporter.write_line(f"{crit}: {'PASS' if lines[crit] else 'FAIL'}")
