"""
In-memory store for built surfaces, keyed by program text, so corpus cases sharing a
program build it once.
"""

import asyncio
import hashlib
import logging
import time
from typing import Any, Awaitable, Callable, Dict, Optional

logger = logging.getLogger(__name__)


def program_key(text: str, namespace: str = "") -> str:
    """Whitespace-insensitive digest of a program, so reformatting keeps the entry."""
    normalised = "\n".join(" ".join(line.split()) for line in text.splitlines() if line.strip())
    return namespace + hashlib.sha256(normalised.encode("utf-8")).hexdigest()


class SurfaceCache:
    """
    Wrapper around dict operations, in the manner of a memory cache backend.

    :param namespace: string prefixed to every key.

    Concurrent :meth:`get_or_build` calls for the same program wait for the first build
    instead of repeating it. A failed build is not stored and the waiters retry it.
    """

    def __init__(self, namespace: str = ""):
        self.namespace = namespace
        self._cache: Dict[str, Any] = {}
        self._events: Dict[str, asyncio.Event] = {}
        self.hits = 0
        self.misses = 0

    def build_key(self, text: str) -> str:
        return program_key(text, self.namespace)

    async def get(self, text: str, default=None):
        start = time.monotonic()
        key = self.build_key(text)
        value = self._cache.get(key)
        logger.debug("GET %s %s (%.4f)s", key[:12], value is not None, time.monotonic() - start)
        return value if value is not None else default

    async def set(self, text: str, value) -> bool:
        start = time.monotonic()
        key = self.build_key(text)
        self._cache[key] = value
        logger.debug("SET %s %d (%.4f)s", key[:12], True, time.monotonic() - start)
        return True

    async def exists(self, text: str) -> bool:
        return self.build_key(text) in self._cache

    async def delete(self, text: str) -> int:
        return 1 if self._cache.pop(self.build_key(text), None) is not None else 0

    async def clear(self) -> bool:
        start = time.monotonic()
        count = len(self._cache)
        self._cache = {}
        logger.debug("CLEAR %s %d (%.4f)s", self.namespace, count, time.monotonic() - start)
        return True

    def __len__(self):
        return len(self._cache)

    async def get_or_build(self, text: str, builder: Callable[[str], Awaitable[Any]]):
        key = self.build_key(text)
        while True:
            if key in self._cache:
                self.hits += 1
                return self._cache[key]
            event = self._events.get(key)
            if event is None:
                break
            await event.wait()

        self.misses += 1
        self._events[key] = asyncio.Event()
        try:
            value = await builder(text)
            self._cache[key] = value
            return value
        finally:
            self._events.pop(key).set()

    def stats(self) -> Dict[str, Optional[int]]:
        return {"entries": len(self._cache), "hits": self.hits, "misses": self.misses}
