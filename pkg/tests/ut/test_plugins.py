from fractions import Fraction
from unittest.mock import MagicMock

import pytest

from tigerhunt.base import API
from tigerhunt.hunt import Fibre, Hunt, HuntRecord, HuntState, NetOutcome, Sigma
from tigerhunt.plugins import BasePlugin, CoefficientTrackerPlugin, TimingPlugin
from tigerhunt.surface import Boundary


def _record(step, coefficients, outcome=None):
    return HuntRecord(
        step=step,
        extracted="E",
        x="x0",
        coefficient=Fraction(1, 2),
        lam=Fraction(1),
        outcome=outcome or Sigma("C"),
        boundary=Boundary(coefficients),
        singularities=(),
    )


class TestAPI:
    def test_registered_operations(self):
        names = {method.__name__ for method in API.CMDS}
        assert {"select", "scale", "find_extremal", "step", "run"} <= names

    def test_unregister(self):
        def op(self):
            pass

        API.register(op)
        assert op in API.CMDS
        API.unregister(op)
        assert op not in API.CMDS

    def test_hooks_wrap_the_call(self):
        calls = []

        class Engine:
            def __init__(self, plugins):
                self.plugins = plugins

            @API.plugins
            def run(self, value):
                calls.append("run")
                return value * 2

        plugin = MagicMock()
        plugin.pre_run.side_effect = lambda *args, **kwargs: calls.append("pre")
        plugin.post_run.side_effect = lambda *args, **kwargs: calls.append("post")
        engine = Engine([plugin])

        assert engine.run(3) == 6
        assert calls == ["pre", "run", "post"]
        plugin.pre_run.assert_called_once_with(engine, 3)
        _, kwargs = plugin.post_run.call_args
        assert kwargs["ret"] == 6


class TestBasePlugin:
    def test_interface_methods(self):
        for method in API.CMDS:
            assert getattr(BasePlugin, "pre_{}".format(method.__name__))(None) is None
            assert getattr(BasePlugin, "post_{}".format(method.__name__))(None) is None

    @pytest.mark.parametrize("op", ["select", "scale", "find_extremal", "step", "run"])
    def test_hunt_operations_have_hooks(self, op):
        assert callable(getattr(BasePlugin, "pre_{}".format(op)))
        assert callable(getattr(BasePlugin, "post_{}".format(op)))

    def test_do_nothing(self):
        assert BasePlugin().do_nothing() is None


class TestTimingPlugin:
    def test_save_time(self):
        engine = Hunt()
        do_save_time = TimingPlugin().save_time("step")
        do_save_time("self", engine, took=1)
        do_save_time("self", engine, took=2)

        assert engine.profiling["step_total"] == 2
        assert engine.profiling["step_max"] == 2
        assert engine.profiling["step_min"] == 1
        assert engine.profiling["step_avg"] == 1.5

    def test_post_hook(self):
        engine = Hunt()
        TimingPlugin().post_select(engine, took=1)
        TimingPlugin().post_select(engine, took=3)

        assert engine.profiling["select_total"] == 2
        assert engine.profiling["select_avg"] == 2

    def test_interface_methods(self):
        for method in API.CMDS:
            assert hasattr(TimingPlugin, "pre_{}".format(method.__name__))
            assert hasattr(TimingPlugin, "post_{}".format(method.__name__))


class TestCoefficientTrackerPlugin:
    @pytest.fixture
    def plugin(self):
        return CoefficientTrackerPlugin()

    def test_post_step_records_states(self, plugin):
        first = _record(1, {"C": Fraction(1, 3)})
        second = _record(2, {"C": Fraction(1, 2)})
        state = HuntState(surface=None, boundary=first.boundary, step=1, log=(first,))
        plugin.post_step(Hunt(), state, ret=state)
        plugin.post_step(Hunt(), state, ret=HuntState(None, second.boundary, 2, (first, second)))

        assert plugin.steps == [first, second]
        assert plugin.coefficients("C") == [Fraction(1, 3), Fraction(1, 2)]
        assert plugin.is_increasing("C")

    def test_post_step_records_nets(self, plugin):
        record = _record(1, {"C": Fraction(2, 3)}, outcome=Fibre("F"))
        ret = NetOutcome(None, None, "F", record.boundary, record)
        plugin.post_step(Hunt(), None, ret=ret)
        assert plugin.steps == [record]

    def test_ignores_failed_steps(self, plugin):
        plugin.post_step(Hunt(), None, ret=None)
        assert plugin.steps == []
        assert plugin.coefficients("C") == []

    def test_not_increasing(self, plugin):
        for step, value in ((1, Fraction(1, 2)), (2, Fraction(1, 3))):
            record = _record(step, {"C": value})
            plugin.post_step(Hunt(), None, ret=HuntState(None, record.boundary, step, (record,)))
        assert not plugin.is_increasing("C")
