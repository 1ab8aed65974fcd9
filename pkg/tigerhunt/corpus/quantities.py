"""
Quantities a corpus expectation can name. Each one is registered with the kind of value it
returns, which decides how computed and expected values are compared.
"""

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Dict, List, Optional, Tuple

from tigerhunt.criteria import (
    klt_certificate,
    line_multiplicity_bound,
    rr_chi,
    uniruled_criterion,
)
from tigerhunt.exact import as_rational, format_rational
from tigerhunt.exceptions import InputError
from tigerhunt.hunt import HuntResult, local_gamma_sequence, run_hunt
from tigerhunt.singularity import ChainSingularity, boundary_coefficient_chain
from tigerhunt.surface.model import (
    SingularPoint,
    SurfaceModel,
    branch_index,
    branches,
    k_dot,
    k_squared,
    k_squared_identity_holds,
    q_self,
)
from tigerhunt.surface.program import BuiltProgram, CurveDecl, parse_program
from tigerhunt.tables import CUSP, NODE, FibreEntry, contraction_entry, fibre_catalogue, fibre_key


class Kind(str, enum.Enum):
    RATIONAL = "rational"
    BOOL = "bool"
    TEXT = "text"
    MULTISET = "multiset"
    SEQUENCE = "sequence"
    CHAIN = "chain"

    def render(self, value) -> str:
        if self is Kind.RATIONAL:
            return format_rational(value)
        if self is Kind.BOOL:
            return "true" if value else "false"
        if self is Kind.TEXT:
            return "".join(str(value).split())
        if self is Kind.MULTISET:
            return ",".join(str(v) for v in sorted(value))
        if self is Kind.SEQUENCE:
            return ",".join(format_rational(v) for v in value)
        weights = tuple(value)
        return ",".join(str(w) for w in max(weights, weights[::-1]))

    def normalise(self, text: str) -> str:
        """Canonical form of an expected value, comparable with :meth:`render`."""
        if self is Kind.RATIONAL:
            return self.render(as_rational(text))
        if self is Kind.BOOL:
            if text.lower() not in ("true", "false"):
                raise InputError("expected true or false, got {!r}".format(text))
            return text.lower()
        if self is Kind.TEXT:
            return self.render(text)
        if self is Kind.MULTISET:
            try:
                return self.render(int(v) for v in text.split(","))
            except ValueError:
                raise InputError("expected integers, got {!r}".format(text)) from None
        if self is Kind.SEQUENCE:
            return self.render(as_rational(v) for v in text.split(","))
        return self.render(ChainSingularity.parse(text).weights)


class Subject:
    """What a case computes on: its program, built surface and hunt, each made on demand."""

    def __init__(self, program: str = "", built: Optional[BuiltProgram] = None):
        self.program = program
        self._built = built

    @property
    def built(self) -> BuiltProgram:
        if self._built is None:
            raise InputError("this quantity needs a blow-up program")
        return self._built

    @cached_property
    def surface(self) -> SurfaceModel:
        return self.built.model()

    @cached_property
    def hunt(self) -> HuntResult:
        return run_hunt(self.surface, boundary=self.built.boundary)

    @cached_property
    def degrees(self) -> Dict[str, int]:
        return {
            statement.name: statement.values[0]
            for statement in parse_program(self.program).statements
            if isinstance(statement, CurveDecl) and statement.kind == "degree"
        }

    def point(self, curve: str) -> SingularPoint:
        self.surface.config.curve(curve)
        point = self.surface.point_of(curve)
        if point is None:
            raise InputError("{} is not contracted".format(curve))
        return point

    def record(self, step: str):
        log = self.hunt.log
        try:
            index = int(step)
        except ValueError:
            raise InputError("hunt steps are numbered from 1, got {!r}".format(step)) from None
        if not 1 <= index <= len(log):
            raise InputError("the hunt has {} step(s), not {}".format(len(log), index))
        return log[index - 1]


@dataclass(frozen=True)
class Quantity:
    name: str
    kind: Kind
    func: Callable
    arity: Optional[int]


QUANTITIES: Dict[str, Quantity] = {}


def quantity(name: str, kind: Kind, arity: Optional[int] = 0):
    """Registers ``func(subject, *args)``; ``arity=None`` takes any number of arguments."""

    def decorator(func):
        QUANTITIES[name] = Quantity(name, kind, func, arity)
        return func

    return decorator


@quantity("index", Kind.RATIONAL, 1)
def _index(subject: Subject, curve: str):
    return subject.point(curve).index


@quantity("weights", Kind.CHAIN, 1)
def _weights(subject: Subject, curve: str):
    point = subject.point(curve)
    if not isinstance(point.graph, ChainSingularity):
        raise InputError("{} lies on a non cyclic point".format(curve))
    return point.graph.weights


@quantity("discrepancy", Kind.RATIONAL, 1)
def _discrepancy(subject: Subject, curve: str):
    return subject.point(curve).discrepancy(curve)


@quantity("coefficient", Kind.RATIONAL, 1)
def _coefficient(subject: Subject, curve: str):
    return subject.point(curve).coefficient


@quantity("minus-k", Kind.RATIONAL, 1)
def _minus_k(subject: Subject, curve: str):
    return -k_dot(subject.surface, curve)


@quantity("selfint", Kind.RATIONAL, 1)
def _selfint(subject: Subject, curve: str):
    return subject.surface.config.curve(curve).self_int


@quantity("qself", Kind.RATIONAL, 1)
def _qself(subject: Subject, curve: str):
    return q_self(subject.surface, curve)


@quantity("k2-identity", Kind.BOOL, 1)
def _k2_identity(subject: Subject, curve: str):
    return k_squared_identity_holds(subject.surface, curve)


@quantity("k-squared", Kind.RATIONAL)
def _k_squared(subject: Subject):
    return k_squared(subject.surface)


@quantity("k-squared-smooth", Kind.RATIONAL)
def _k_squared_smooth(subject: Subject):
    return subject.surface.config.k_squared_smooth


@quantity("rho", Kind.RATIONAL)
def _rho(subject: Subject):
    return subject.surface.rho


@quantity("rr-chi", Kind.RATIONAL)
def _rr_chi(subject: Subject):
    chi, _ = rr_chi(subject.surface)
    return chi


@quantity("branch-indices", Kind.MULTISET, 1)
def _branch_indices(subject: Subject, curve: str) -> List[int]:
    S = subject.surface
    return [branch_index(S, branch) for branch in branches(S, curve)]


@quantity("uniruled", Kind.BOOL, 1)
def _uniruled(subject: Subject, curve: str):
    """``-K·C >= 1/x + 1/y`` for a curve with exactly two singular branches."""
    indices = _branch_indices(subject, curve)
    if len(indices) != 2:
        raise InputError("{} has {} singular branches, not two".format(curve, len(indices)))
    x, y = indices
    return uniruled_criterion(_minus_k(subject, curve), x, y)


@quantity("germ-index", Kind.RATIONAL, 1)
def _germ_index(subject: Subject, germ: str):
    try:
        incidences = subject.built.analysis_germs[germ]
    except KeyError:
        raise InputError("no analysis germ {}".format(germ)) from None
    return branch_index(subject.surface, incidences)


@quantity("hunt-reason", Kind.TEXT)
def _hunt_reason(subject: Subject):
    return subject.hunt.reason.value


@quantity("hunt-steps", Kind.RATIONAL)
def _hunt_steps(subject: Subject):
    return len(subject.hunt.log)


@quantity("hunt-extracted", Kind.TEXT, 1)
def _hunt_extracted(subject: Subject, step: str):
    return subject.record(step).extracted


@quantity("hunt-coefficient", Kind.RATIONAL, 1)
def _hunt_coefficient(subject: Subject, step: str):
    return subject.record(step).coefficient.std


@quantity("hunt-final-indices", Kind.MULTISET)
def _hunt_final_indices(subject: Subject):
    return [point.index for point in subject.hunt.final.surface.points]


@quantity("line-multiplicity", Kind.RATIONAL)
def _line_multiplicity(subject: Subject):
    return line_multiplicity_bound(subject.built.boundary, subject.degrees)


@quantity("klt-certificate", Kind.BOOL)
def _klt_certificate(subject: Subject):
    m = _line_multiplicity(subject)
    return klt_certificate(subject.surface, subject.built.boundary, m).ok


@quantity("chain-index", Kind.RATIONAL, 1)
def _chain_index(subject: Subject, chain: str):
    return ChainSingularity.parse(chain).index


@quantity("boundary-coefficient", Kind.RATIONAL, 2)
def _boundary_coefficient(subject: Subject, chain: str, lam: str):
    return boundary_coefficient_chain(ChainSingularity.parse(chain), as_rational(lam))


@quantity("local-gamma", Kind.SEQUENCE, None)
def _local_gamma(subject: Subject, e0: str, *steps: str):
    """Steps read ``<chain>:<j>+<j>...``, the γ components meeting the marked end."""
    parsed = []
    for step in steps:
        chain, _, meeting = step.partition(":")
        try:
            positions = [int(j) for j in meeting.split("+") if j]
        except ValueError:
            raise InputError("bad γ step {!r}".format(step)) from None
        parsed.append((chain, positions))
    return local_gamma_sequence(e0, parsed)


@quantity("contraction", Kind.TEXT, 3)
def _contraction(subject: Subject, kind: str, genus: str, configuration: str):
    if kind not in (NODE, CUSP):
        raise InputError("contractions are over a node or a cusp, not {!r}".format(kind))
    try:
        g = int(genus)
    except ValueError:
        raise InputError("genus must be an integer, got {!r}".format(genus)) from None
    return contraction_entry(kind, g, configuration).constraint


@lru_cache(maxsize=None)
def _catalogue() -> Tuple[FibreEntry, ...]:
    return tuple(fibre_catalogue())


def _spaceless(text: str) -> str:
    return "".join(text.split())


@quantity("fibre", Kind.TEXT, 1)
def _fibre(subject: Subject, points: str):
    """
    ``m=<multiplicity>,lt=<bool>`` of the catalogued fibre with these points, then the fibre
    itself when it is a chain, read from whichever end gives the smaller text.
    """
    key = fibre_key(points)
    found = []
    for entry in _catalogue():
        if entry.key != key:
            continue
        text = "m={},lt={}".format(entry.multiplicity, Kind.BOOL.render(entry.lt))
        if entry.components is not None:
            notation = min(
                entry.chain_notation(), entry.chain_notation(reverse=True), key=_spaceless
            )
            text += "," + notation
        found.append(text)
    if not found:
        raise InputError("no catalogued fibre has points {}".format(points))
    return "|".join(found)
