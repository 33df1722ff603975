import pytest
from hypothesis import settings

from cusplab.excursions import build_series
from cusplab.reals import RandomSpec

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_series():
    """Eight random inputs at 2000 convergents, shared by the analysis tests."""
    return [build_series(RandomSpec.derive(7, i, 3000), 2000) for i in range(8)]
