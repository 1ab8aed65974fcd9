import pytest

from tigerhunt.cache import SurfaceCache
from tigerhunt.corpus import CorpusRunner


@pytest.fixture
def surface_cache():
    return SurfaceCache(namespace="test:")


@pytest.fixture
def runner(surface_cache):
    return CorpusRunner(cache=surface_cache, concurrency=2)
