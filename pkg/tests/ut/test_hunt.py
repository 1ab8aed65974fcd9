from fractions import Fraction

import pytest

from tigerhunt.exact import EpsRational
from tigerhunt.exceptions import (
    FlushnessLost,
    InputError,
    MonotonicityViolation,
    PushforwardMismatch,
    RayNotNegative,
    ScaleOutOfRange,
    SmoothSurface,
)
from tigerhunt.hunt import (
    Fibre,
    Hunt,
    HuntState,
    NetOutcome,
    StopReason,
    gamma_sequence,
    hunt_step,
    local_gamma_sequence,
    _check_hunt_from_empty,
    _check_pushforward,
    run_hunt,
    scale,
    select_hunt_divisor,
)
from tigerhunt.surface import (
    Boundary,
    exceptional_coefficients,
    is_flush,
    k_squared,
    log_pullback,
)
from tigerhunt.surface.pairs import FlushResult

from ..utils import BANANA_HUNT, TWO_LINES, model


@pytest.fixture(scope="module")
def surface():
    return model(BANANA_HUNT)


@pytest.fixture(scope="module")
def result(surface):
    return run_hunt(surface)


class TestSelect:
    def test_maximal_coefficient(self, surface):
        assert select_hunt_divisor(surface) == "A"

    def test_smooth_surface(self):
        with pytest.raises(SmoothSurface):
            select_hunt_divisor(model(TWO_LINES))


class TestStep:
    def test_first_step(self, surface):
        state = hunt_step(HuntState(surface, Boundary()))
        assert isinstance(state, HuntState)
        (record,) = state.log
        assert record.step == 1
        assert record.extracted == "A"
        assert record.x == "x0"
        assert record.coefficient == Fraction(30, 37)
        assert not record.is_net
        assert state.step == 1


class TestRun:
    def test_banana_reaches_a_net(self, result):
        assert result.reason is StopReason.NET
        assert isinstance(result.net, NetOutcome)
        assert isinstance(result.net.record.outcome, Fibre)
        assert [r.extracted for r in result.log][:3] == ["A", "B", "Ed2"]
        assert len(result.log) == 4

    def test_final_surface(self, result):
        assert [p.index for p in result.final.surface.points] == [2]

    def test_to_dict(self, result):
        report = result.to_dict()
        assert report["reason"] == "net"
        assert report["detail"] is None
        assert [step["step"] for step in report["steps"]] == [1, 2, 3, 4]
        assert report["steps"][-1]["outcome"]["kind"] == "net"

    def test_step_limit(self, surface):
        limited = run_hunt(surface, max_steps=1)
        assert limited.reason is StopReason.STEP_LIMIT
        assert len(limited.states) == 2
        assert len(limited.log) == 1

    def test_smooth(self):
        smooth = run_hunt(model(TWO_LINES))
        assert smooth.reason is StopReason.SMOOTH
        assert smooth.log == ()

    def test_needs_a_step(self, surface):
        with pytest.raises(InputError):
            run_hunt(surface, max_steps=0)

    def test_plugins_see_every_step(self, surface, mock_plugin):
        Hunt(plugins=[mock_plugin]).run(surface, max_steps=1)
        assert mock_plugin.pre_run.call_count == 1
        assert mock_plugin.post_run.call_count == 1
        assert mock_plugin.pre_step.call_count == 1
        assert mock_plugin.post_select.call_count == 1
        _, kwargs = mock_plugin.post_step.call_args
        assert kwargs["ret"].step == 1
        assert kwargs["took"] >= 0


class TestGammaSequences:
    def test_gamma_sequence_starts_at_the_coefficient(self, result):
        sequence = gamma_sequence(result)
        assert sequence[0] == ("A", Fraction(30, 37))
        assert len(sequence) == len(result.log)

    def test_local_gamma(self):
        sequence = local_gamma_sequence("60/67", [("3,2,2@L", [1]), ("2@L", [1])])
        assert sequence == [Fraction(60, 67), Fraction(381, 469), Fraction(30, 67)]

    def test_local_gamma_unknown_component(self):
        with pytest.raises(InputError):
            local_gamma_sequence("1/2", [("2@L", [2])])


class TestBananaStages:
    @pytest.mark.parametrize(
        "index, singularities, k2",
        [
            (1, ["2", "2,2,2,2", "3,2,2"], Fraction(10, 7)),
            (2, ["2", "2,2"], 6),
            (3, ["2"], 8),
        ],
    )
    def test_surfaces(self, result, index, singularities, k2):
        state = result.states[index]
        assert sorted(str(g) for g in state.surface.singularities()) == singularities
        assert sorted(result.log[index - 1].singularities) == singularities
        assert k_squared(state.surface) == k2

    def test_lambda_exceeds_one(self, result):
        assert any(record.lam is not None for record in result.log)
        assert all(record.lam is None or record.lam > 1 for record in result.log)

    def test_first_stage_is_flush(self, result):
        assert is_flush(result.states[1].surface, result.states[1].boundary)

    def test_extracted_coefficients_decrease(self, result):
        for state in result.states[1:]:
            extracted = [r.extracted for r in state.log]
            values = [state.boundary.coefficient(c) for c in extracted]
            values = [v for v in values if v]
            assert values == sorted(values, reverse=True)
            assert len(set(values)) == len(values)

    def test_pushforward_keeps_exceptional_coefficients(self, result):
        for state, following, record in zip(result.states, result.states[1:], result.log):
            extension = state.surface.extract(record.extracted)
            gamma = log_pullback(state.surface, state.boundary, [record.extracted])
            lam, scaled = scale(extension, gamma, record.extracted, record.outcome.curve)
            assert lam == record.lam
            over_t = exceptional_coefficients(extension, scaled)
            over_s = exceptional_coefficients(following.surface, following.boundary)
            assert over_s
            for curve, value in over_s.items():
                if curve in over_t:
                    assert over_t[curve] == value


@pytest.fixture
def plane():
    return model("curve A degree 1\ncurve B degree 2\ncurve D degree 1\n")


class TestScale:
    def test_lambda(self, plane):
        lam, scaled = scale(plane, Boundary({"B": 1}), "B", "D")
        assert lam == EpsRational(Fraction(3, 2), Fraction(-3, 2))
        assert scaled.coefficient("B") == lam * EpsRational(1, 1)

    def test_numerically_trivial(self, plane):
        lam, _ = scale(plane, Boundary({"A": 1, "B": 1}), "B", "D", epsilon=False)
        assert lam == 1

    def test_ray_positive_against_the_bumped_boundary(self, plane):
        with pytest.raises(RayNotNegative) as excinfo:
            scale(plane, Boundary({"A": 1, "B": 1}), "B", "D")
        assert excinfo.value.diagnostics["value"] == EpsRational(0, 2)

    def test_trivial_scale_must_be_one(self, plane):
        with pytest.raises(ScaleOutOfRange):
            scale(plane, Boundary({"B": 1}), "B", "D", epsilon=False)


class TestStepChecks:
    def test_pushforward_mismatch(self, one_point):
        half, third = Boundary({"C": Fraction(1, 2)}), Boundary({"C": Fraction(1, 3)})
        _check_pushforward(one_point, half, one_point, half, 1)
        with pytest.raises(PushforwardMismatch) as excinfo:
            _check_pushforward(one_point, half, one_point, third, 1)
        assert excinfo.value.diagnostics == {"curve": "E", "step": 1}

    def test_extracted_out_of_order(self, one_point):
        state = HuntState(one_point, Boundary(), step=1)
        following = Boundary({"A": Fraction(1, 3), "B": Fraction(1, 2)})
        with pytest.raises(MonotonicityViolation):
            _check_hunt_from_empty(state, one_point, Boundary(), one_point, following, ["A", "B"])

    def test_first_step_must_stay_flush(self, surface, mocker):
        witness = FlushResult(False, "Ed1", EpsRational(1), EpsRational(Fraction(1, 2)))
        mocker.patch("tigerhunt.hunt.is_flush", return_value=witness)
        with pytest.raises(FlushnessLost) as excinfo:
            hunt_step(HuntState(surface, Boundary()))
        assert excinfo.value.diagnostics["witness"] == "Ed1"

    def test_boundary_from_elsewhere_skips_flushness(self, surface, mocker):
        check = mocker.patch("tigerhunt.hunt.is_flush")
        state = hunt_step(HuntState(surface, Boundary()))
        following = hunt_step(HuntState(state.surface, state.boundary, step=0))
        assert check.call_count == 2
        assert isinstance(following, HuntState)
