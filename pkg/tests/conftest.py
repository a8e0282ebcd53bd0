import cmath
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from qwalk.coin import make_coin

_ACCEPTANCE_LINES = []


def record_criterion(number, name, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name}"
    if detail:
        line += f" ({detail})"
    _ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def u2_coin(alpha, phi, psi, delta):
    """General U(2) element, parametrized so every entry is nonzero for alpha in (0, pi/2)."""
    g = cmath.exp(1j * delta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return make_coin(
        g * cmath.exp(1j * phi) * ca,
        g * cmath.exp(1j * psi) * sa,
        -g * cmath.exp(-1j * psi) * sa,
        g * cmath.exp(-1j * phi) * ca,
    )


angles = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)
coins = st.builds(
    u2_coin,
    st.floats(min_value=0.05, max_value=math.pi / 2 - 0.05),
    angles,
    angles,
    angles,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
