import enum
from dataclasses import dataclass
from fractions import Fraction
from unittest import mock

import pytest

from tigerhunt.exact import EpsRational
from tigerhunt.serializers import BaseSerializer, JsonSerializer, StringSerializer, to_primitive
from tigerhunt.serializers.serializers import MsgPackSerializer
from tigerhunt.singularity import SMOOTH, ChainSingularity, StarSingularity


class Colour(enum.Enum):
    RED = "red"


@dataclass
class Point:
    name: str
    index: int


class Report:
    def to_dict(self):
        return {"coefficient": Fraction(30, 37)}


REPORT = {
    "chain": ChainSingularity((2, 5, 2, 2, 2, 2)),
    "index": 37,
    "discrepancies": [Fraction(15, 37), Fraction(0)],
    "holds": True,
    "reason": None,
}


class TestToPrimitive:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (Fraction(15, 37), "15/37"),
            (Fraction(4, 2), "2"),
            (EpsRational(Fraction(1, 2), -1), {"std": "1/2", "eps": "-1"}),
            (Colour.RED, "red"),
            (ChainSingularity((3, 2), (True, False)), "3,2@L"),
            (StarSingularity.parse("star(2; 2 | 2 | 3)"), "star(2; 2 | 2 | 3)"),
            (SMOOTH, "smooth"),
            (Point("x0", 37), {"name": "x0", "index": 37}),
            (Report(), {"coefficient": "30/37"}),
            ((1, True, None), [1, True, None]),
            ({3, 1, 2}, [1, 2, 3]),
            ({1: "a"}, {"1": "a"}),
        ],
    )
    def test_values(self, value, expected):
        assert to_primitive(value) == expected

    def test_refuses_floats(self):
        with pytest.raises(TypeError):
            to_primitive(0.5)


class TestStringSerializer:
    def test_init(self):
        serializer = StringSerializer()
        assert isinstance(serializer, BaseSerializer)
        assert serializer.DEFAULT_ENCODING == "utf-8"
        assert serializer.encoding == "utf-8"

    def test_init_encoding(self):
        serializer = StringSerializer(encoding="whatever")
        assert serializer.DEFAULT_ENCODING == "utf-8"
        assert serializer.encoding == "whatever"

    def test_dumps(self):
        assert StringSerializer().dumps(REPORT) == "\n".join(
            [
                "chain: 2,5,2,2,2,2",
                "index: 37",
                "discrepancies:",
                "  - 15/37",
                "  - 0",
                "holds: true",
                "reason: -",
            ]
        )

    def test_nested(self):
        text = StringSerializer().dumps({"points": [{"name": "x0"}], "empty": []})
        assert text == "points:\n  -\n    name: x0\nempty: none"

    def test_loads(self):
        assert StringSerializer().loads("hi") == "hi"


class TestJsonSerializer:
    def test_init(self):
        serializer = JsonSerializer()
        assert isinstance(serializer, BaseSerializer)
        assert serializer.DEFAULT_ENCODING == "utf-8"
        assert serializer.encoding == "utf-8"

    def test_dumps_is_stable(self):
        assert JsonSerializer().dumps(REPORT) == JsonSerializer().dumps(dict(REPORT))

    def test_loads(self):
        loaded = JsonSerializer().loads(JsonSerializer().dumps(REPORT))
        assert loaded == {
            "chain": "2,5,2,2,2,2",
            "index": 37,
            "discrepancies": ["15/37", "0"],
            "holds": True,
            "reason": None,
        }

    def test_loads_with_none(self):
        assert JsonSerializer().loads(None) is None


class TestMsgPackSerializer:
    @pytest.fixture(autouse=True)
    def needs_msgpack(self):
        pytest.importorskip("msgpack")

    def test_init(self):
        serializer = MsgPackSerializer()
        assert isinstance(serializer, BaseSerializer)
        assert serializer.DEFAULT_ENCODING is None
        assert serializer.encoding is None
        assert serializer.use_list is True

    def test_init_use_list(self):
        assert MsgPackSerializer(use_list=False).use_list is False

    def test_round_trip(self):
        serializer = MsgPackSerializer()
        assert serializer.loads(serializer.dumps(REPORT))["discrepancies"] == ["15/37", "0"]

    def test_loads_with_none(self):
        assert MsgPackSerializer().loads(None) is None

    def test_dumps_and_loads_dict(self):
        serializer = MsgPackSerializer()
        d = {"a": [1, 2, ("1", 2)], "b": {"b": 1, "c": [1, 2]}}
        assert serializer.loads(serializer.dumps(d)) == {
            "a": [1, 2, ["1", 2]],
            "b": {"b": 1, "c": [1, 2]},
        }

    def test_missing_msgpack(self):
        with mock.patch("tigerhunt.serializers.serializers.msgpack", None):
            with pytest.raises(RuntimeError):
                MsgPackSerializer()
