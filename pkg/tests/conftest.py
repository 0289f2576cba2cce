import numpy as np
import pytest
from pytest import Config, FixtureRequest, Item, Parser


def pytest_configure(config: Config):
    config.addinivalue_line("markers", "slow: acceptance-scale tests, run with --run-slow")


def pytest_addoption(parser: Parser):
    parser.addoption("--seed", default=7, type=int, help="seed of the randomized tests")
    parser.addoption("--run-slow", action="store_true", default=False, help="run acceptance-scale tests")


def pytest_collection_modifyitems(config: Config, items: list[Item]):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def seed(request: FixtureRequest) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
