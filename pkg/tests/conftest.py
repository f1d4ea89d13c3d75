import random
from pathlib import Path

import pytest
from hypothesis import settings

from admkahler.setup import AdmissibleSetup

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
SETUPS = ROOT / "setups"


@pytest.fixture
def trivial():
    return AdmissibleSetup()


@pytest.fixture
def koiso_sakane():
    return AdmissibleSetup.of(0, 0, [(1, "1/2", 2), (1, "-1/2", -2)])


@pytest.fixture
def genus2_unstable():
    return AdmissibleSetup.of(0, 0, [(1, "9/10", -3)])


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def setups_dir():
    return SETUPS
