import numpy as np
import pytest
from hypothesis import settings

from ccaqst import _kernels

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["jit", "numpy"])
def kernel_path(request):
    """Run a test once through each kernel implementation."""
    if request.param == "jit" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    previous = _kernels.JIT_ENABLED
    _kernels.use_jit(request.param == "jit")
    yield request.param
    _kernels.use_jit(previous)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request, capsys):
    """Record one acceptance line; printed immediately and again in the summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
