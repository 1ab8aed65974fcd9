import asyncio
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from tigerhunt.cache import SurfaceCache
from tigerhunt.corpus.format import CorpusCase, Expectation, load_cases
from tigerhunt.corpus.quantities import QUANTITIES, Subject
from tigerhunt.exceptions import BuildFailure, TigerhuntError
from tigerhunt.serializers import BaseSerializer, StringSerializer
from tigerhunt.surface.model import surface_report
from tigerhunt.surface.program import BuiltProgram, build

logger = logging.getLogger(__name__)

DEFAULT_CONCURRENCY = 4


@dataclass(frozen=True)
class Outcome:
    expectation: Expectation
    computed: Optional[str] = None
    expected: Optional[str] = None
    ok: bool = False
    error: Optional[str] = None

    @property
    def counts(self) -> bool:
        return not self.expectation.informational

    def to_dict(self) -> Dict[str, Any]:
        entry = self.expectation.to_dict()
        entry["expected"] = self.expected if self.expected is not None else entry["expected"]
        entry["computed"] = self.computed
        entry["ok"] = self.ok
        if self.error is not None:
            entry["error"] = self.error
        return entry


@dataclass(frozen=True)
class CaseReport:
    case: CorpusCase
    outcomes: List[Outcome] = field(default_factory=list)
    error: Optional[str] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.error is None and all(o.ok for o in self.outcomes if o.counts)

    @property
    def failures(self) -> List[Outcome]:
        return [o for o in self.outcomes if o.counts and not o.ok]

    def to_dict(self) -> Dict[str, Any]:
        entry = {
            "id": self.case.id,
            "title": self.case.title,
            "passed": self.passed,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }
        if self.error is not None:
            entry["error"] = self.error
        if self.diagnostics:
            entry["diagnostics"] = self.diagnostics
        return entry


@dataclass(frozen=True)
class CorpusReport:
    entries: List[CaseReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def failures(self) -> List[CaseReport]:
        return [entry for entry in self.entries if not entry.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "cases": len(self.entries),
            "failed": [entry.case.id for entry in self.failures],
            "entries": [entry.to_dict() for entry in self.entries],
        }


def _diagnostics(built: Optional[BuiltProgram]) -> Dict[str, Any]:
    if built is None:
        return {}
    diagnostics: Dict[str, Any] = {"intersections": built.config.intersection_table()}
    try:
        diagnostics["surface"] = surface_report(built.model())
    except TigerhuntError as e:
        diagnostics["surface"] = {"error": str(e)}
    return diagnostics


def _check(subject: Subject, expectation: Expectation) -> Outcome:
    known = QUANTITIES[expectation.quantity]
    try:
        expected = known.kind.normalise(expectation.value)
        computed = known.kind.render(known.func(subject, *expectation.args))
    except (TigerhuntError, ValueError) as e:
        return Outcome(expectation, error="{}: {}".format(type(e).__name__, e))
    return Outcome(expectation, computed, expected, computed == expected)


def evaluate_case(case: CorpusCase, built: Optional[BuiltProgram] = None) -> CaseReport:
    """
    Computes every expectation of ``case`` on ``built`` and compares the canonical
    renderings. Quantities that fail to compute become failed outcomes rather than errors.
    """
    subject = Subject(case.program, built)
    outcomes = [_check(subject, expectation) for expectation in case.expectations]
    report = CaseReport(case, outcomes)
    if not report.passed:
        report = CaseReport(case, outcomes, diagnostics=_diagnostics(built))
    return report


class CorpusRunner:
    """
    Runs corpus cases concurrently. Programs are built in worker threads and memoised in
    ``cache``, so cases and family members sharing a program build it once.

    :param serializer: used by :meth:`dumps`. Defaults to
        :class:`tigerhunt.serializers.StringSerializer`.
    :param cache: :class:`tigerhunt.cache.SurfaceCache` instance. Defaults to a fresh one
        under the ``"corpus:"`` namespace.
    :param concurrency: maximum number of cases evaluated at once.
    """

    def __init__(
        self,
        serializer: Optional[BaseSerializer] = None,
        cache: Optional[SurfaceCache] = None,
        concurrency: int = DEFAULT_CONCURRENCY,
    ):
        self.serializer = serializer or StringSerializer()
        self.cache = cache if cache is not None else SurfaceCache(namespace="corpus:")
        self.concurrency = max(1, concurrency)

    async def _build(self, text: str) -> BuiltProgram:
        try:
            return await asyncio.to_thread(build, text)
        except TigerhuntError as e:
            raise BuildFailure(
                "{}: {}".format(type(e).__name__, e),
                diagnostics={"line": getattr(e, "line", None)},
            ) from e

    async def run_case(self, case: CorpusCase) -> CaseReport:
        start = time.monotonic()
        built = None
        try:
            if case.program.strip():
                built = await self.cache.get_or_build(case.program, self._build)
        except BuildFailure as e:
            report = CaseReport(case, error=str(e), diagnostics=e.diagnostics)
        else:
            report = await asyncio.to_thread(evaluate_case, case, built)
        logger.debug(
            "CASE %s %s (%.4f)s",
            case.id,
            "ok" if report.passed else "FAILED",
            time.monotonic() - start,
        )
        return report

    async def _gather(self, cases: Sequence[CorpusCase]) -> CorpusReport:
        semaphore = asyncio.Semaphore(self.concurrency)

        async def bounded(case):
            async with semaphore:
                return await self.run_case(case)

        entries = await asyncio.gather(*(bounded(case) for case in cases))
        return CorpusReport(list(entries))

    async def run_family(
        self, case: CorpusCase, k_range: Optional[Sequence[int]] = None
    ) -> CorpusReport:
        """
        :raises: :class:`tigerhunt.exceptions.InputError` if some ``k`` lies outside the
            family's declared range.
        """
        return await self._gather(case.members(k_range))

    async def run_all(self, cases: Optional[Sequence[CorpusCase]] = None) -> CorpusReport:
        """Every case, family members expanded. ``cases`` defaults to the shipped corpus."""
        if cases is None:
            cases = await asyncio.to_thread(load_cases)
        members = [member for case in cases for member in case.members()]
        return await self._gather(members)

    def dumps(self, report: CorpusReport):
        return self.serializer.dumps(report)
