import numpy as np
import pytest
from hypothesis import settings

from basin_rkhs.kernel import KernelEngine
from basin_rkhs.presets import example_13, example_14

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def r13():
    return example_13()


@pytest.fixture(scope="session")
def q14():
    return example_14()


@pytest.fixture(scope="session")
def engine13(r13):
    return KernelEngine(r13)


@pytest.fixture(scope="session")
def engine14(q14):
    return KernelEngine(q14)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
