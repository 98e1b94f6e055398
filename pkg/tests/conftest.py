import numpy as np
import pytest

from ccztwist.gfield import get_field


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def f8():
    return get_field(2, 3)


def pytest_configure(config):
    config.addinivalue_line("markers", "large: slow sweeps, skipped unless --large is given")


def pytest_addoption(parser):
    parser.addoption("--large", action="store_true", help="run the n >= 12 sweeps")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--large"):
        return
    skip = pytest.mark.skip(reason="needs --large")
    for item in items:
        if "large" in item.keywords:
            item.add_marker(skip)
