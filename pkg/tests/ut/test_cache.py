import asyncio

import pytest

from tigerhunt.cache import SurfaceCache, program_key

PROGRAM = "curve A degree 1\ncurve B degree 1\n"


@pytest.fixture
def cache():
    return SurfaceCache(namespace="test:")


class TestProgramKey:
    def test_whitespace_insensitive(self):
        assert program_key(PROGRAM) == program_key("  curve A  degree 1\n\ncurve B degree 1")

    def test_namespace(self):
        assert program_key(PROGRAM, "corpus:").startswith("corpus:")
        assert program_key(PROGRAM) != program_key("curve A degree 2")


class TestSurfaceCache:
    async def test_get_missing(self, cache):
        assert await cache.get(PROGRAM) is None
        assert await cache.get(PROGRAM, default=1) == 1

    async def test_set_get(self, cache):
        assert await cache.set(PROGRAM, "built") is True
        assert await cache.get(PROGRAM) == "built"
        assert await cache.exists(PROGRAM)
        assert len(cache) == 1

    async def test_build_key(self, cache):
        assert cache.build_key(PROGRAM).startswith("test:")

    async def test_delete(self, cache):
        await cache.set(PROGRAM, "built")
        assert await cache.delete(PROGRAM) == 1
        assert await cache.delete(PROGRAM) == 0
        assert not await cache.exists(PROGRAM)

    async def test_clear(self, cache):
        await cache.set(PROGRAM, "built")
        assert await cache.clear() is True
        assert len(cache) == 0

    async def test_get_or_build_memoises(self, cache, mocker):
        builder = mocker.AsyncMock(return_value="built")
        assert await cache.get_or_build(PROGRAM, builder) == "built"
        assert await cache.get_or_build(PROGRAM, builder) == "built"
        builder.assert_awaited_once_with(PROGRAM)
        assert cache.stats() == {"entries": 1, "hits": 1, "misses": 1}

    async def test_concurrent_builds_share_one_call(self, cache):
        calls = []

        async def builder(text):
            calls.append(text)
            await asyncio.sleep(0.01)
            return "built"

        results = await asyncio.gather(*(cache.get_or_build(PROGRAM, builder) for _ in range(5)))
        assert results == ["built"] * 5
        assert len(calls) == 1

    async def test_failed_build_is_not_stored(self, cache):
        async def failing(text):
            raise ValueError("boom")

        with pytest.raises(ValueError):
            await cache.get_or_build(PROGRAM, failing)
        assert not await cache.exists(PROGRAM)
        assert await cache.get_or_build(PROGRAM, _built) == "built"


async def _built(text):
    return "built"
