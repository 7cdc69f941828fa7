import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sotmem.zoo import available_models, load_workload  # noqa: E402


@pytest.fixture(scope="session")
def cv_zoo():
    return [load_workload(n) for n in available_models("cv")]


@pytest.fixture(scope="session")
def nlp_zoo():
    return [load_workload(n) for n in available_models("nlp")]


@pytest.fixture(scope="session")
def zoo(cv_zoo, nlp_zoo):
    return cv_zoo + nlp_zoo


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance" in rep.nodeid and rep.when == "call":
                lines += [l for l in rep.capstdout.splitlines() if l.startswith("AC-")]
    if lines:
        terminalreporter.section("acceptance criteria")
        for l in sorted(lines, key=lambda s: int(s.split()[0][3:])):
            terminalreporter.write_line(l)
