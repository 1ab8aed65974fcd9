from unittest.mock import create_autospec

import pytest

from tigerhunt.plugins import BasePlugin

from ..utils import BANANA, ONE_POINT, model


@pytest.fixture(scope="session")
def banana():
    """The banana surface: a (2,5,2,2,2,2) and a (2,2,4,2,2,2,2) point."""
    return model(BANANA)


@pytest.fixture
def one_point():
    return model(ONE_POINT)


@pytest.fixture
def mock_plugin():
    return create_autospec(BasePlugin, instance=True)
