import random
import sys

import pytest

from daxsim.system import MachineConfig, System

PAGE = 4096
LINE = 64


def make_system(mode="ev", pages=24, threads=1, map_pages=None, **kw):
    """Small desk machine with the first ``pages`` logical pages DAX-mapped."""
    system = System(MachineConfig.desk(), mode, threads=threads, **kw)
    if pages:
        system.map_file(0, pages * PAGE)
    return system


def line_addr(system, page, line=0):
    """Physical address of line ``line`` of logical page ``page``."""
    return system.phys(page * PAGE + line * LINE)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    gate = sys.modules.get("test_acceptance")
    if gate is None or not gate.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(gate.RESULTS):
        terminalreporter.write_line(gate.RESULTS[n])
