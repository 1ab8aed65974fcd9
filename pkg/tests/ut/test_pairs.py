from fractions import Fraction
from itertools import product

import pytest

from tigerhunt.exact import EPSILON
from tigerhunt.exceptions import InconsistentVerdict, InputError, InvalidBoundary
from tigerhunt.singularity import Verdict, classify_reduced_germ
from tigerhunt.surface import (
    Boundary,
    classify_pair,
    coefficient_of,
    exceptional_coefficients,
    is_flush,
    is_level,
    log_pullback,
    log_resolution,
)

from ..utils import TWO_LINES, model


class TestBoundary:
    def test_drops_zero_coefficients(self):
        boundary = Boundary({"C": 0, "D": Fraction(1, 2)})
        assert boundary.support == ["D"]
        assert boundary.coefficient("C") == 0

    @pytest.mark.parametrize("value", [2, Fraction(-1, 2), "x", 0.5])
    def test_invalid(self, value):
        with pytest.raises(InvalidBoundary):
            Boundary({"C": value})

    def test_unchecked(self):
        assert Boundary({"C": 2}, check=False).coefficient("C") == 2

    def test_m(self):
        assert Boundary().m == 1
        assert Boundary({"C": Fraction(1, 2), "D": Fraction(1, 3)}).m == Fraction(1, 3)

    def test_epsilon_coefficients(self):
        boundary = Boundary({"C": 1 - EPSILON})
        assert not boundary.is_standard
        assert boundary.coefficient("C") < 1

    def test_scaled_and_without(self):
        boundary = Boundary({"C": Fraction(1, 2), "D": 1})
        assert boundary.scaled(2).coefficient("D") == 2
        assert boundary.without("D").support == ["C"]
        assert boundary.with_coefficient("D", Fraction(1, 4)).to_dict() == {
            "C": "1/2",
            "D": "1/4",
        }


class TestCoefficients:
    def test_exceptional(self, one_point):
        boundary = Boundary({"C": Fraction(1, 2)})
        assert exceptional_coefficients(one_point, boundary) == {"E": Fraction(1, 2)}
        assert exceptional_coefficients(one_point, Boundary()) == {"E": Fraction(1, 3)}

    def test_coefficient_of(self, one_point):
        boundary = Boundary({"C": Fraction(1, 4)})
        assert coefficient_of(one_point, boundary, "E") == Fraction(5, 12)
        with pytest.raises(InputError):
            coefficient_of(one_point, boundary, "Z")

    def test_log_pullback(self, one_point):
        gamma = log_pullback(one_point, Boundary({"C": Fraction(1, 2)}), ["E"])
        assert gamma.to_dict() == {"C": "1/2", "E": "1/2"}
        with pytest.raises(InputError):
            log_pullback(one_point, Boundary(), ["C"])


class TestFlushAndLevel:
    def test_flush_fails_at_the_exceptional_curve(self, one_point):
        result = is_flush(one_point, Boundary({"C": Fraction(1, 2)}))
        assert not result
        assert result.witness == "E"
        assert result.coefficient == Fraction(1, 2)

    def test_level_allows_equality(self, one_point):
        assert is_level(one_point, Boundary({"C": Fraction(1, 2)}))

    def test_flush_with_large_coefficient(self, one_point):
        assert is_flush(one_point, Boundary({"C": Fraction(3, 4)}))

    def test_smooth_pair(self):
        S = model(TWO_LINES)
        assert is_flush(S, Boundary({"A": Fraction(1, 2)}))
        result = is_flush(S, Boundary({"A": Fraction(1, 2), "B": Fraction(1, 2)}))
        assert result
        assert result.witness == "A∩B"
        assert result.coefficient == 0


class TestLogResolution:
    def test_nothing_to_do(self, one_point):
        assert log_resolution(one_point, ["C"]) == one_point.config

    def test_tangent_curves(self):
        S = model("curve B degree 2\ncurve D degree 1\npoint d on B D contact B:D=2\n")
        cfg = log_resolution(S, ["B", "D"])
        assert len(cfg.history) == 2


class TestClassifyPair:
    @pytest.mark.parametrize(
        "coefficient, verdict", [(Fraction(1, 2), Verdict.KLT), (1, Verdict.PLT)]
    )
    def test_one_point(self, one_point, coefficient, verdict):
        assert classify_pair(one_point, Boundary({"C": coefficient})) == {"x0": verdict}

    def test_two_reduced_lines(self):
        S = model(TWO_LINES)
        assert classify_pair(S, Boundary({"A": 1, "B": 1})) == {"p": Verdict.LT}

    def test_tangent_reduced_curves(self):
        S = model("curve B degree 2\ncurve D degree 1\npoint d on B D contact B:D=2\n")
        verdicts = classify_pair(S, Boundary({"B": 1, "D": 1}))
        assert verdicts["d"] is Verdict.NOT_LC


def _chain_with_germs(weights, touched):
    lines = ["surface abstract k2 0 rho {}".format(len(weights) + 3)]
    for i, w in enumerate(weights):
        lines.append("curve E{} self -{} kdeg {}".format(i, w, w - 2))
        if i:
            lines.append("intersect E{} E{} 1".format(i - 1, i))
    for name, j in zip("CD", touched):
        lines.append("curve {} self 1 kdeg -3".format(name))
        lines.append("intersect {} E{} 1".format(name, j))
    return "\n".join(lines) + "\n"


def _chain_cases():
    for length in (1, 2, 3):
        for weights in product(range(2, 5), repeat=length):
            for j in range(length):
                yield weights, (j,)
                for k in range(j, length):
                    yield weights, (j, k)


class TestReducedVerdictsAgree:
    @pytest.mark.slow
    def test_chain_sweep(self):
        for weights, touched in _chain_cases():
            S = model(_chain_with_germs(weights, touched))
            point = S.point("x0")
            germs = [{point.position("E{}".format(j)): 1} for j in touched]
            boundary = Boundary({name: 1 for name in "CD"[: len(touched)]})
            expected = classify_reduced_germ(point.graph, germs)
            assert classify_pair(S, boundary)["x0"] is expected, (weights, touched)

    @pytest.mark.parametrize(
        "weights, touched, verdict",
        [
            ((3,), (0,), Verdict.PLT),
            ((2, 3, 2), (1,), Verdict.LC),
            ((2, 2), (0, 1), Verdict.LC),
            ((2, 2), (0, 0), Verdict.NOT_LC),
            ((2, 3, 3), (1,), Verdict.NOT_LC),
        ],
    )
    def test_known_points(self, weights, touched, verdict):
        S = model(_chain_with_germs(weights, touched))
        boundary = Boundary({name: 1 for name in "CD"[: len(touched)]})
        assert classify_pair(S, boundary)["x0"] is verdict

    def test_disagreement_raises(self, one_point, mocker):
        mocker.patch(
            "tigerhunt.surface.pairs.classify_reduced_germ", return_value=Verdict.NOT_LC
        )
        with pytest.raises(InconsistentVerdict) as excinfo:
            classify_pair(one_point, Boundary({"C": 1}))
        assert excinfo.value.diagnostics["point"] == "x0"

    def test_fractional_boundary_is_not_checked(self, one_point, mocker):
        check = mocker.patch("tigerhunt.surface.pairs.classify_reduced_germ")
        classify_pair(one_point, Boundary({"C": Fraction(1, 2)}))
        check.assert_not_called()
