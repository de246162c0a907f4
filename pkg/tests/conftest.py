import numpy as np
import pytest

from xicontour.spectrum import Spectrum, basis_for

PENTAGON = [[0, 1, 0, 4, 1], [0, 0, 1, 1, 4]]
INF = [[0, 1, 0, 2, 0], [0, 0, 1, 0, 2]]

# one line per acceptance criterion, printed in the terminal summary
_ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    _ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def pentagon():
    spec = Spectrum(np.array(PENTAGON, dtype=float))
    return spec, basis_for(spec).B


@pytest.fixture(scope="session")
def inf_example():
    spec = Spectrum(np.array(INF, dtype=float))
    return spec, basis_for(spec).B
