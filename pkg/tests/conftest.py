import os

import pytest
from hypothesis import HealthCheck, settings

from detsing.germ import GermPresentation

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SAMPLES = os.path.join(os.path.dirname(__file__), os.pardir, "samples")
XYZ = ("x", "y", "z")
WH_ROWS = [["z", "y", "x^3"], ["x^2", "z", "y"]]
WH_WEIGHTS = (3, 8, 7)


def sample(name: str) -> str:
    return os.path.abspath(os.path.join(SAMPLES, name))


@pytest.fixture(scope="session")
def wh():
    return GermPresentation.from_strings(WH_ROWS, XYZ)


@pytest.fixture(scope="session")
def line():
    return GermPresentation.from_strings([["x", "y"]], ("x", "y"))


@pytest.fixture(scope="session")
def zero12():
    return GermPresentation.from_strings([["0", "0"]], ("x", "y"))
