import importlib

import numpy as np
import pytest

from polarssk import _kernels_py

try:
    _compiled = importlib.import_module("polarssk._kernels")
except ImportError:  # extension not built
    _compiled = None

BACKENDS = [pytest.param(_kernels_py, id="python")]
if _compiled is not None:
    BACKENDS.append(pytest.param(_compiled, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def compiled():
    if _compiled is None:
        pytest.skip("compiled extension not built")
    return _compiled


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line; the test then asserts on the same condition."""

    def record(criterion: str, ok: bool, detail: str) -> bool:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
