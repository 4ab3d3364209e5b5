import pytest


def pytest_addoption(parser):
    """Add --regen and --slow options to pytest."""
    parser.addoption("--regen", action="store_true",
                     default=False, help="regenerate reference data")
    parser.addoption("--slow", action="store_true",
                     default=False, help="run long exhaustive checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --slow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
