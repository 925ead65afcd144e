import pytest

from arithmetic.adder import build_spatial_adder
from arithmetic.multiplier import build_multiplier
from core.utils import Printter


@pytest.fixture(autouse=True, scope="session")
def quiet_printter():
    Printter.quiet = True
    yield
    Printter.quiet = False


@pytest.fixture(scope="session")
def multiplier():
    return build_multiplier()


@pytest.fixture(scope="session")
def adder():
    return build_spatial_adder()
