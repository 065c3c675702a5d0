import numpy as np
import pytest

import dixlab
from dixlab import kernels


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion; the lines are
    replayed in a terminal section at the end of the run."""

    def record(num, ok, detail):
        lines = getattr(request.config, "_acceptance_lines", None)
        if lines is None:
            lines = []
            request.config._acceptance_lines = lines
        lines.append(
            "criterion %d %s  %s" % (num, "PASS" if ok else "FAIL", detail)
        )

    return record


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile every jitted kernel once so timed tests measure math,
    not JIT latency."""
    v = np.array([3.0, 2.0, 1.0])
    kernels.comp_sum(v)
    kernels.power_sum(v, 1.5)
    kernels.heat_sum(v, 10.0, 1.0)
    kernels.prefix_log_average(v, np.array([1, 2], dtype=np.int64))
    kernels.max_log_average(v)
    kernels.prefix_dominates(v, v)
    kernels.lattice_w(2, 3)


@pytest.fixture(scope="session")
def harmonic_1e6():
    return dixlab.harmonic_model(10**6)


@pytest.fixture(scope="session")
def torus_2000():
    return dixlab.LatticeModel(2, 2000)


@pytest.fixture(scope="session")
def oscillator_1e7():
    return dixlab.OscillatorModel(10**7)
