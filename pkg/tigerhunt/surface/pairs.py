"""
Pairs ``(S, Δ)``: boundaries, log pullback, coefficients of exceptional divisors, log
resolutions, the flush/level predicates and the klt/plt/lt/lc classification.
"""

import logging
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from tigerhunt.exact import ZERO, EpsRational, format_rational
from tigerhunt.exceptions import (
    InconsistentVerdict,
    InputError,
    InvalidBoundary,
    NonFiniteContact,
)
from tigerhunt.singularity import Verdict, classify_reduced_germ
from tigerhunt.surface.configuration import Configuration
from tigerhunt.surface.model import SurfaceModel, branches, pullback_on

logger = logging.getLogger(__name__)

RESOLUTION_GUARD = 500
ONE = EpsRational(1)


@dataclass(frozen=True)
class Boundary:
    """
    ``Σ a_C·C`` over kept curves. Coefficients are EpsRationals in ``[0, 1]``; pass
    ``check=False`` for the intermediate sub-boundaries of log pullbacks.
    """

    coefficients: Mapping[str, EpsRational] = field(default_factory=dict)
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        values = {}
        for curve, value in dict(self.coefficients).items():
            try:
                value = EpsRational.lift(value)
            except (TypeError, ValueError) as e:
                raise InvalidBoundary("coefficient of {}: {}".format(curve, e)) from None
            if self.check and not ZERO <= value <= ONE:
                raise InvalidBoundary(
                    "coefficient {} of {} is outside [0, 1]".format(value, curve)
                )
            if value:
                values[curve] = value
        object.__setattr__(self, "coefficients", values)

    def coefficient(self, curve: str) -> EpsRational:
        return self.coefficients.get(curve, ZERO)

    @property
    def support(self) -> List[str]:
        return list(self.coefficients)

    @property
    def m(self) -> EpsRational:
        """Least nonzero coefficient, 1 for the empty boundary."""
        return min(self.coefficients.values(), default=ONE)

    @property
    def is_standard(self) -> bool:
        return all(v.is_standard for v in self.coefficients.values())

    def with_coefficient(self, curve: str, value) -> "Boundary":
        coefficients = dict(self.coefficients)
        coefficients[curve] = value
        return Boundary(coefficients, check=self.check)

    def without(self, *curves: str) -> "Boundary":
        return Boundary(
            {c: v for c, v in self.coefficients.items() if c not in curves}, check=self.check
        )

    def scaled(self, factor) -> "Boundary":
        return Boundary({c: v * factor for c, v in self.coefficients.items()}, check=False)

    def checked(self) -> "Boundary":
        return Boundary(self.coefficients)

    def items(self):
        return self.coefficients.items()

    def to_dict(self) -> Dict[str, str]:
        return {c: format_rational(v) for c, v in self.coefficients.items()}

    def __len__(self):
        return len(self.coefficients)


@dataclass(frozen=True)
class FlushResult:
    ok: bool
    witness: Optional[str]
    coefficient: Optional[EpsRational]
    bound: EpsRational

    def __bool__(self):
        return self.ok


def exceptional_coefficients(S: SurfaceModel, boundary: Boundary) -> Dict[str, EpsRational]:
    """``e(E, K + Δ)`` for every exceptional curve of the minimal resolution."""
    cfg = S.config
    result: Dict[str, EpsRational] = {}
    for point in S.points:
        rhs = {}
        for e in point.curves:
            value = EpsRational(cfg.curve(e).k_deg)
            for c, a in boundary.items():
                value = value + a * cfg.intersection(c, e)
            rhs[e] = value
        solved = pullback_on(point, rhs)
        result.update((e, EpsRational.lift(x)) for e, x in zip(point.curves, solved))
    return result


def log_pullback(S: SurfaceModel, boundary: Boundary, extracted: Iterable[str]) -> Boundary:
    """``Γ = Δ̃ + Σ e(E)·E`` over the extracted curves."""
    extracted = list(extracted)
    for e in extracted:
        if e not in S.exceptional:
            raise InputError("{} is not contracted on this surface".format(e))
    coefficients = dict(boundary.items())
    e = exceptional_coefficients(S, boundary)
    for curve in extracted:
        coefficients[curve] = e[curve]
    return Boundary(coefficients, check=False)


def _fresh(cfg: Configuration, taken: set) -> str:
    n = 1
    while "R{}".format(n) in cfg.curves or "R{}".format(n) in taken:
        n += 1
    return "R{}".format(n)


def _needs_blowup(cfg: Configuration, point: str, relevant) -> bool:
    cluster = cfg.points[point]
    germs = [g for g in cluster.germs if cfg.germs[g].curve in relevant]
    if len(germs) >= 3:
        return True
    if any(cfg.germs[g].multiplicity > 1 for g in germs):
        return True
    if len({cfg.germs[g].curve for g in germs}) < len(germs):
        return True
    return any(cluster.contact(g, h) >= 2 for g, h in combinations(germs, 2))


def _resolve(S: SurfaceModel, support: Iterable[str]) -> Tuple[Configuration, Dict[str, str]]:
    """Log resolution plus, for each new curve, the point of S it lies over."""
    cfg = S.config
    relevant = set(support) | set(S.exceptional)
    base: Dict[str, str] = {}
    for _ in range(RESOLUTION_GUARD):
        bad = next((p for p in cfg.points if _needs_blowup(cfg, p, relevant)), None)
        if bad is None:
            return cfg, base
        curves = {cfg.germs[g].curve for g in cfg.points[bad].germs}
        origin = bad
        for c in curves:
            point = S.point_of(c)
            if point is not None:
                origin = point.name
                break
            if c in base:
                origin = base[c]
        name = _fresh(cfg, relevant)
        cfg = cfg.blow_up(bad, name)
        relevant.add(name)
        base[name] = origin
    raise NonFiniteContact(
        "no simple normal crossing model after {} blow-ups".format(RESOLUTION_GUARD)
    )


def log_resolution(S: SurfaceModel, support: Iterable[str]) -> Configuration:
    """
    Blows up tracked points until the exceptional curves and ``support`` have simple normal
    crossings.

    :raises: :class:`tigerhunt.exceptions.NonFiniteContact`
    """
    start = time.monotonic()
    cfg, _ = _resolve(S, support)
    logger.debug(
        "LOG-RESOLUTION %d blow-ups (%.4f)s",
        len(cfg.history) - len(S.config.history),
        time.monotonic() - start,
    )
    return cfg


def _all_coefficients(
    S: SurfaceModel, boundary: Boundary, cfg: Configuration
) -> Dict[str, EpsRational]:
    coefficients = {c: boundary.coefficient(c) for c in S.kept}
    coefficients.update(exceptional_coefficients(S, boundary))
    for record in cfg.history[len(S.config.history):]:
        value = EpsRational(-1)
        for curve, m in record.multiplicities.items():
            value = value + coefficients.get(curve, ZERO) * m
        coefficients[record.curve] = value
    return coefficients


def coefficient_of(
    S: SurfaceModel, boundary: Boundary, divisor: str, config: Optional[Configuration] = None
) -> EpsRational:
    """
    ``e(V, K + Δ)`` for an exceptional curve of the minimal resolution or a curve created by
    blowing up ``S.config`` further (``config``).
    """
    coefficients = _all_coefficients(S, boundary, config or S.config)
    if divisor not in coefficients:
        raise InputError("{} is not a divisor over this surface".format(divisor))
    return coefficients[divisor]


def _predicate(S: SurfaceModel, boundary: Boundary, strict: bool) -> FlushResult:
    bound = boundary.m

    def fails(value):
        return value >= bound if strict else value > bound

    exceptional = exceptional_coefficients(S, boundary)
    if exceptional:
        witness = max(exceptional, key=exceptional.get)
        if fails(exceptional[witness]):
            return FlushResult(False, witness, exceptional[witness], bound)

    cfg, _ = _resolve(S, boundary.support)
    coefficients = _all_coefficients(S, boundary, cfg)
    candidates: Dict[str, EpsRational] = {
        c: v for c, v in coefficients.items() if c in exceptional or c not in S.config.curves
    }
    positive = [c for c, v in coefficients.items() if v > ZERO]
    for a, b in combinations(positive, 2):
        if cfg.intersection(a, b):
            candidates["{}∩{}".format(a, b)] = coefficients[a] + coefficients[b] - 1
    if not candidates:
        return FlushResult(True, None, None, bound)
    witness = max(candidates, key=candidates.get)
    return FlushResult(not fails(candidates[witness]), witness, candidates[witness], bound)


def is_flush(S: SurfaceModel, boundary: Boundary) -> FlushResult:
    """Every exceptional divisor has coefficient ``< m(Δ)``; the witness is the maximum."""
    return _predicate(S, boundary, strict=True)


def is_level(S: SurfaceModel, boundary: Boundary) -> FlushResult:
    return _predicate(S, boundary, strict=False)


def classify_pair(S: SurfaceModel, boundary: Boundary) -> Dict[str, Verdict]:
    """
    Verdicts at the singular points and at the tracked smooth points of the support, from
    the coefficients of the log resolution.
    """
    cfg, base = _resolve(S, boundary.support)
    coefficients = _all_coefficients(S, boundary, cfg)
    reduced = [c for c in boundary.support if boundary.coefficient(c) == ONE]

    over: Dict[str, List[EpsRational]] = {p.name: [] for p in S.points}
    for point in S.points:
        over[point.name].extend(coefficients[e] for e in point.curves)
    for curve, origin in base.items():
        over.setdefault(origin, []).append(coefficients[curve])

    branch_count: Dict[str, int] = {}
    nodal = set()
    for c in reduced:
        for branch in branches(S, c):
            branch_count[branch.point] = branch_count.get(branch.point, 0) + 1
    for name, cluster in S.config.points.items():
        curves = [S.config.germs[g].curve for g in cluster.germs]
        if any(S.point_of(c) for c in curves):
            continue
        support = [c for c in curves if c in boundary.coefficients]
        if len(support) >= 2 or name in over:
            over.setdefault(name, [])
            on_point = [c for c in curves if c in reduced]
            branch_count[name] = len(on_point)
            if len(set(on_point)) < len(on_point):
                nodal.add(name)

    verdicts: Dict[str, Verdict] = {}
    for name, values in over.items():
        worst = max(values, default=None)
        if worst is not None and worst > ONE:
            verdicts[name] = Verdict.NOT_LC
        elif worst is not None and worst == ONE:
            verdicts[name] = Verdict.LC
        else:
            count = branch_count.get(name, 0)
            if count < 2:
                verdicts[name] = (Verdict.KLT, Verdict.PLT)[count]
            else:
                verdicts[name] = Verdict.LC if name in nodal else Verdict.LT
    _check_reduced_points(S, boundary, verdicts)
    return verdicts


def _check_reduced_points(S: SurfaceModel, boundary: Boundary, verdicts: Mapping[str, Verdict]):
    """
    At singular points where only reduced components pass, the verdict from coefficients must
    agree with the combinatorial one of :func:`classify_reduced_germ`.
    """
    germs: Dict[str, List[Dict[int, int]]] = {}
    mixed = set()
    for c in boundary.support:
        for branch in branches(S, c):
            if boundary.coefficient(c) != ONE:
                mixed.add(branch.point)
                continue
            point = S.point(branch.point)
            germs.setdefault(branch.point, []).append(
                {point.position(e): n for e, n in branch.incidences}
            )
    for name, found in germs.items():
        if name in mixed:
            continue
        expected = classify_reduced_germ(S.point(name).graph, found)
        if expected is not verdicts[name]:
            raise InconsistentVerdict(
                "{}: coefficients give {}, the reduced germs give {}".format(
                    name, verdicts[name].value, expected.value
                ),
                diagnostics={"point": name, "germs": found},
            )
