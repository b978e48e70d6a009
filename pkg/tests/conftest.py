import pytest
from hypothesis import HealthCheck, settings

from vdfkit.group import UnknownOrderGroup

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def g35():
    """N = 5 * 7 with its trapdoor phi = 24."""
    return UnknownOrderGroup(35, 24)
