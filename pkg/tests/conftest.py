import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from platoon_eso.config import ControllerGains, EsoGains, make_scenario

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile(
    "thorough", max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

REFERENCE_EPS = (-0.8, 0.1, 0.5, -0.2, 0.65, -0.3)


@pytest.fixture
def nominal_gains():
    return ControllerGains(8.0, 40.0, 1.2)


@pytest.fixture
def eso15():
    return EsoGains.from_bandwidth(15.0)


@pytest.fixture
def reference_config(nominal_gains, eso15):
    return make_scenario(5, 0.1, 0.3, nominal_gains, eso15, epsilons=REFERENCE_EPS,
                         p0=(30, 24, 18, 12, 6, 0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
