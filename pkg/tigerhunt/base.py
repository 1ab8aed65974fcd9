import functools
import logging
import time
from typing import Callable, Set

logger = logging.getLogger(__name__)


class API:
    """
    Registry of the engine operations plugins can hook into. Decorate an operation with
    :meth:`register` to make ``pre_<name>``/``post_<name>`` hooks exist on every plugin, and
    with :meth:`plugins` to have those hooks called around it.
    """

    CMDS: Set[Callable[..., object]] = set()

    @classmethod
    def register(cls, func):
        API.CMDS.add(func)
        return func

    @classmethod
    def unregister(cls, func):
        API.CMDS.discard(func)

    @classmethod
    def plugins(cls, func):
        @functools.wraps(func)
        def _plugins(self, *args, **kwargs):
            start = time.monotonic()
            for plugin in self.plugins:
                getattr(plugin, "pre_{}".format(func.__name__))(self, *args, **kwargs)

            ret = func(self, *args, **kwargs)

            end = time.monotonic()
            for plugin in self.plugins:
                getattr(plugin, "post_{}".format(func.__name__))(
                    self, *args, took=end - start, ret=ret, **kwargs
                )
            return ret

        return _plugins
