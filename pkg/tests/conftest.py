import math

import numpy as np
import pytest

from qtx.config import load_scenario
from qtx.model import EV, HBAR, M_E, DeviceGeometry, MaterialParams, NumericsConfig, build_profile
from qtx.sweeps import bias_dataset, bias_spec, devices, energy_spec, sensitivity_dataset

ANG = 1e-10
MASS = 0.1 * M_E
V0 = 4.0 * EV
V1 = 1.0 * EV

ACCEPTANCE_LINES = []


def rect_T(E, V, width, m):
    """Closed-form transmission through one rectangular barrier below its top."""
    E = np.asarray(E, dtype=float)
    kappa = np.sqrt(2 * m * (V - E)) / HBAR
    return 1.0 / (1.0 + V ** 2 * np.sinh(kappa * width) ** 2 / (4 * E * (V - E)))


def rect_dTdl(E, V, width, m):
    """Analytic gap derivative of :func:`rect_T`."""
    kappa = math.sqrt(2 * m * (V - E)) / HBAR
    c = V ** 2 / (4 * E * (V - E))
    s = math.sinh(kappa * width)
    T = 1.0 / (1.0 + c * s * s)
    return -T * T * c * 2 * s * math.cosh(kappa * width) * kappa


@pytest.fixture(scope="session")
def fig2():
    return load_scenario("figure2")


@pytest.fixture(scope="session")
def fig3():
    return load_scenario("figure3")


@pytest.fixture(scope="session")
def fig4():
    return load_scenario("figure4")


@pytest.fixture(scope="session")
def double():
    return build_profile(DeviceGeometry(20 * ANG, 50 * ANG, 20 * ANG), MaterialParams(V0, V1, 0.1))


@pytest.fixture(scope="session")
def single():
    return build_profile(DeviceGeometry(20 * ANG), MaterialParams(V0, V1, 0.1))


@pytest.fixture(scope="session")
def numerics():
    return NumericsConfig()


@pytest.fixture(scope="session")
def fig2_devices(fig2):
    return devices(fig2)


@pytest.fixture(scope="session")
def resonances(fig2_devices):
    return fig2_devices.resonances


@pytest.fixture(scope="session")
def fig3_sensitivity(fig3):
    return sensitivity_dataset(fig3, energy_spec(fig3))


@pytest.fixture(scope="session")
def fig4_bias(fig4):
    return bias_dataset(fig4, bias_spec(fig4))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
