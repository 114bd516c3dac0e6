import pytest
from hypothesis import HealthCheck, settings

from barrierkets import BarrierModel, QuadratureSpec, default_battery

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def model():
    return BarrierModel()


@pytest.fixture(scope="session")
def spec():
    return QuadratureSpec()


@pytest.fixture(scope="session")
def battery(model):
    # Session scope keeps the packets alive, so the transform caches keyed
    # on them are shared across all tests that expand the same battery.
    return default_battery(model)
