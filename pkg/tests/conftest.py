import os

import pytest
from hypothesis import HealthCheck, settings

from ssmp import _kernels
from ssmp.core import Instance, Match, Solution

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

KERNELS = _kernels.available()


@pytest.fixture(params=KERNELS)
def kernel(request):
    return request.param


# The illustrative instance: the first match {5.4} ~ {1.1, 2.8, 1.5} is the
# standard worked example; the second match is a stand-in.
@pytest.fixture
def fig1():
    return Instance.from_strings(["5.4", "2.0"], ["1.1", "2.8", "1.5", "2.05"], "0.1", 2)


@pytest.fixture
def fig1_s2():
    return Solution((Match.from_indices([0], [0, 1, 2]), Match.from_indices([1], [3])))


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number: int, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        lines.append(line)
        tr = request.config.pluginmanager.get_plugin("terminalreporter")
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
