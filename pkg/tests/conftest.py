import pytest

from stereoacuity.geometry import DisplayProfile, build_level_table


@pytest.fixture(scope="session")
def ipad():
    return DisplayProfile(ppi=264.0, width_px=2048, height_px=1536)


@pytest.fixture(scope="session")
def near_table(ipad):
    return build_level_table(ipad, 0.5)


@pytest.fixture(scope="session")
def far_table(ipad):
    return build_level_table(ipad, 3.0)
