import numpy as np
import pytest

from qndprop import TruncationSpec, make_model


@pytest.fixture
def two_mode_h1():
    return make_model(1.0, [1.0, 1.7], [0.15, 0.1])


@pytest.fixture
def one_mode_h1():
    return make_model(1.0, [1.0], [0.2])


@pytest.fixture
def spin_bath_m2():
    return make_model(1.0, [0.8, 1.1], [0.4, 0.3], kind="spin")


@pytest.fixture
def fock30():
    return TruncationSpec(fock_cutoff=30)


def max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdicts, one line per criterion, after the run."""
    import sys

    mod = next((m for name, m in list(sys.modules.items())
                if name.endswith("test_acceptance") and hasattr(m, "RESULTS")), None)
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        passed, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"CRITERION {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
