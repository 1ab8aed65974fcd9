import enum
import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from typing import Any, Optional

from tigerhunt.exact import EpsRational, format_rational
from tigerhunt.singularity import ChainSingularity, Smooth, StarSingularity

logger = logging.getLogger(__name__)

try:
    import ujson as json  # noqa: I900
except ImportError:
    logger.debug("ujson module not found, using json")
    import json  # type: ignore[no-redef]

try:
    import msgpack
except ImportError:
    msgpack = None
    logger.debug("msgpack not installed, MsgPackSerializer unavailable")


_NOT_SET = object()


def to_primitive(value: Any) -> Any:
    """
    Reduces reports to str/int/bool/list/dict. Fractions become ``"p/q"`` strings (``"p"``
    when integral) and EpsRationals ``{"std": ..., "eps": ...}``.
    """
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, EpsRational):
        return {"std": format_rational(value.std), "eps": format_rational(value.eps)}
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (ChainSingularity, StarSingularity, Smooth)):
        return str(value)
    if hasattr(value, "to_dict"):
        return to_primitive(value.to_dict())
    if is_dataclass(value):
        return to_primitive(asdict(value))
    if isinstance(value, dict):
        return {str(k): to_primitive(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_primitive(v) for v in items]
    raise TypeError("cannot serialize {!r}".format(type(value).__name__))


class BaseSerializer(ABC):

    DEFAULT_ENCODING: Optional[str] = "utf-8"

    def __init__(self, *args, encoding=_NOT_SET, **kwargs):
        self.encoding = self.DEFAULT_ENCODING if encoding is _NOT_SET else encoding
        super().__init__(*args, **kwargs)

    @abstractmethod
    def dumps(self, value: Any, /) -> Any:
        """Serialise a report."""

    @abstractmethod
    def loads(self, value: Any, /) -> Any:
        """Decode a serialised report."""


class StringSerializer(BaseSerializer):
    """
    Renders reports as indented ``key: value`` text, the default CLI output. Rationals keep
    their exact ``p/q`` form. ``loads`` returns the text unchanged.
    """

    def dumps(self, value):
        lines = []
        self._render(to_primitive(value), 0, lines)
        return "\n".join(lines)

    def _render(self, value, depth, lines):
        pad = "  " * depth
        if isinstance(value, dict):
            for key, item in value.items():
                if isinstance(item, (dict, list)) and item:
                    lines.append("{}{}:".format(pad, key))
                    self._render(item, depth + 1, lines)
                else:
                    lines.append("{}{}: {}".format(pad, key, self._scalar(item)))
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, (dict, list)) and item:
                    lines.append("{}-".format(pad))
                    self._render(item, depth + 1, lines)
                else:
                    lines.append("{}- {}".format(pad, self._scalar(item)))
        else:
            lines.append("{}{}".format(pad, self._scalar(value)))

    @staticmethod
    def _scalar(value):
        if value is None:
            return "-"
        if isinstance(value, bool):
            return "true" if value else "false"
        if value == [] or value == {}:
            return "none"
        return str(value)

    def loads(self, value):
        return value


class JsonSerializer(BaseSerializer):
    """
    Transform reports to json with json.dumps and json.loads to retrieve them back. Keys keep
    their insertion order so output is byte-stable for fixed inputs.

    ujson will be used by default if available.
    """

    def dumps(self, value):
        return json.dumps(to_primitive(value), indent=2, ensure_ascii=False)

    def loads(self, value):
        if value is None:
            return None
        return json.loads(value)


class MsgPackSerializer(BaseSerializer):
    """
    Transform reports to bytes using msgpack.dumps and msgpack.loads to retrieve them back.
    You need to have ``msgpack`` installed in order to be able to use this serializer.

    :param use_list: bool. Can be used to change use_list param for ``msgpack.loads`` method.
        Default is True.
    """

    DEFAULT_ENCODING = None

    def __init__(self, *args, use_list=True, **kwargs):
        if not msgpack:
            raise RuntimeError("msgpack not installed, MsgPackSerializer unavailable")
        self.use_list = use_list
        super().__init__(*args, **kwargs)

    def dumps(self, value):
        return msgpack.dumps(to_primitive(value))

    def loads(self, value):
        if value is None:
            return None
        return msgpack.loads(value, raw=False, use_list=self.use_list)
