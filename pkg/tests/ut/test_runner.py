import pytest

from tigerhunt.cache import SurfaceCache
from tigerhunt.corpus import CorpusRunner, evaluate_case, parse_case
from tigerhunt.exceptions import InputError
from tigerhunt.serializers import JsonSerializer
from tigerhunt.surface import build

LINES = """
case lines
title Two lines
curve A degree 1
curve B degree 1
point p on A B
expect selfint A 1 cite lines
expect rho 1 cite lines
"""

WRONG = LINES.replace("case lines", "case wrong").replace("selfint A 1", "selfint A 2")

INFORMATIONAL = LINES.replace("case lines", "case informational").replace(
    "rho 1 cite lines", "rho 5 cite lines informational"
)

BROKEN = "case broken\ncurve A degree 1\nblowup q along A\nexpect rho 1 cite lines\n"

FAMILY = """
case family
family k 1 3
curve A degree 1
curve B degree 1
point p on A B
blowup p along A times {k} as E
expect selfint A {1-k} cite lines
"""


class TestEvaluateCase:
    def test_passes(self):
        case = parse_case(LINES)
        report = evaluate_case(case, build(case.program))
        assert report.passed
        assert [o.computed for o in report.outcomes] == ["1", "1"]
        assert report.diagnostics == {}

    def test_wrong_expectation(self):
        case = parse_case(WRONG)
        report = evaluate_case(case, build(case.program))
        assert not report.passed
        (failure,) = report.failures
        assert (failure.expected, failure.computed) == ("2", "1")
        assert "intersections" in report.diagnostics
        assert "surface" in report.diagnostics

    def test_informational_failure_does_not_count(self):
        case = parse_case(INFORMATIONAL)
        report = evaluate_case(case, build(case.program))
        assert report.passed
        assert not report.outcomes[1].ok
        assert report.failures == []

    def test_quantity_error_is_a_failed_outcome(self):
        case = parse_case("case c\nexpect index A 3 cite lines\n")
        report = evaluate_case(case)
        (outcome,) = report.outcomes
        assert not outcome.ok
        assert outcome.error.startswith("InputError")
        assert outcome.to_dict()["error"] == outcome.error


class TestCorpusRunner:
    def test_defaults(self, runner):
        assert runner.concurrency == 2
        assert CorpusRunner().cache.namespace == "corpus:"
        assert CorpusRunner(concurrency=0).concurrency == 1

    async def test_run_case(self, runner):
        report = await runner.run_case(parse_case(LINES))
        assert report.passed
        assert report.to_dict()["passed"] is True

    async def test_build_failure(self, runner):
        report = await runner.run_case(parse_case(BROKEN))
        assert not report.passed
        assert report.outcomes == []
        assert "unknown" in report.error
        assert report.diagnostics == {"line": 3}
        assert await runner.cache.exists(parse_case(BROKEN).program) is False

    async def test_run_all(self, runner):
        report = await runner.run_all([parse_case(LINES), parse_case(WRONG)])
        assert not report.passed
        assert [entry.case.id for entry in report.failures] == ["wrong"]
        assert report.to_dict()["failed"] == ["wrong"]
        assert report.to_dict()["cases"] == 2

    async def test_cases_share_builds(self, runner, mocker):
        spy = mocker.spy(runner, "_build")
        await runner.run_all([parse_case(LINES), parse_case(WRONG), parse_case(INFORMATIONAL)])
        assert spy.call_count == 1
        assert runner.cache.stats()["entries"] == 1

    async def test_run_family(self, runner):
        report = await runner.run_family(parse_case(FAMILY))
        assert report.passed
        assert [entry.case.id for entry in report.entries] == [
            "family[1]",
            "family[2]",
            "family[3]",
        ]

    async def test_run_family_range(self, runner):
        report = await runner.run_family(parse_case(FAMILY), [2])
        assert [entry.case.id for entry in report.entries] == ["family[2]"]
        with pytest.raises(InputError):
            await runner.run_family(parse_case(FAMILY), [4])

    async def test_shared_cache(self):
        cache = SurfaceCache()
        first, second = CorpusRunner(cache=cache), CorpusRunner(cache=cache)
        await first.run_case(parse_case(LINES))
        await second.run_case(parse_case(WRONG))
        assert cache.stats()["hits"] == 1

    async def test_dumps(self):
        runner = CorpusRunner(serializer=JsonSerializer())
        report = await runner.run_all([parse_case(LINES)])
        loaded = runner.serializer.loads(runner.dumps(report))
        assert loaded["passed"] is True
        assert loaded["entries"][0]["outcomes"][0]["computed"] == "1"
