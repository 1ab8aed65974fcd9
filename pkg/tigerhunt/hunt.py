"""
The hunt: repeatedly extract the exceptional divisor of maximal coefficient, scale the log
pullback until the second extremal ray is trivial, and contract that ray. Stops when the
ray is a fibration (a net), when no tracked curve spans the ray, or at the step limit.
"""

import enum
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from tigerhunt.base import API
from tigerhunt.exact import EPSILON, ZERO, EpsRational, RationalLike, as_rational
from tigerhunt.exceptions import (
    ComputationError,
    ContractionNotLT,
    DegenerateRay,
    FlushnessLost,
    InputError,
    MonotonicityViolation,
    NotLogTerminal,
    NotMinusOne,
    NotNegativeDefinite,
    PushforwardMismatch,
    RayNotNegative,
    ScaleOutOfRange,
    SmoothSurface,
    UnrecognizedGraph,
    UnresolvedRay,
)
from tigerhunt.singularity import ChainSingularity, StarSingularity, germ_coefficients
from tigerhunt.surface.configuration import Configuration
from tigerhunt.surface.model import (
    Policy,
    SurfaceModel,
    contract_to_surface,
    k_dot,
    q_intersection,
    q_self,
)
from tigerhunt.surface.pairs import Boundary, exceptional_coefficients, is_flush, log_pullback

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 10


@dataclass(frozen=True)
class Sigma:
    """Birational ray spanned by a tracked curve of negative self-intersection."""

    curve: str


@dataclass(frozen=True)
class Fibre:
    """Fibration ray: a K-negative curve of self-intersection zero."""

    curve: str


@dataclass(frozen=True)
class Unresolved:
    reason: str


Extremal = Union[Sigma, Fibre, Unresolved]


class StopReason(str, enum.Enum):
    NET = "net"
    UNRESOLVED = "unresolved"
    STEP_LIMIT = "step-limit"
    SMOOTH = "smooth"


@dataclass(frozen=True)
class HuntRecord:
    step: int
    extracted: str
    x: str
    coefficient: EpsRational
    lam: Optional[EpsRational]
    outcome: Union[Sigma, Fibre]
    boundary: Boundary
    singularities: Tuple[str, ...]

    @property
    def is_net(self) -> bool:
        return isinstance(self.outcome, Fibre)

    def to_dict(self) -> Dict:
        kind = "net" if self.is_net else "contracted"
        return {
            "step": self.step,
            "extracted": self.extracted,
            "x": self.x,
            "coefficient": self.coefficient,
            "lambda": self.lam,
            "outcome": {"kind": kind, "curve": self.outcome.curve},
            "singularities_after": list(self.singularities),
            "boundary_after": dict(self.boundary.items()),
        }


@dataclass(frozen=True)
class HuntState:
    """``(S_i, Δ_i)`` after ``step`` hunt steps, with the records that led to it."""

    surface: SurfaceModel
    boundary: Boundary
    step: int = 0
    log: Tuple[HuntRecord, ...] = ()


@dataclass(frozen=True)
class NetOutcome:
    """The step from ``state`` produced a P¹-fibration on ``extension``."""

    state: HuntState
    extension: SurfaceModel
    fibre: str
    boundary: Boundary
    record: HuntRecord


@dataclass(frozen=True)
class HuntResult:
    states: Tuple[HuntState, ...]
    reason: StopReason
    net: Optional[NetOutcome] = None
    detail: Optional[str] = None

    @property
    def final(self) -> HuntState:
        return self.states[-1]

    @property
    def log(self) -> Tuple[HuntRecord, ...]:
        if self.net is not None:
            return self.final.log + (self.net.record,)
        return self.final.log

    def to_dict(self) -> Dict:
        return {
            "reason": self.reason.value,
            "detail": self.detail,
            "steps": [record.to_dict() for record in self.log],
        }


def k_plus_delta_degree(S: SurfaceModel, boundary: Boundary, curve: Optional[str] = None):
    """
    ``(K + Δ)·H`` for a kept curve ``H`` of positive self-intersection, the first one in
    configuration order unless ``curve`` is given.
    """
    if curve is None:
        curve = next((c for c in S.kept if q_self(S, c) > 0), None)
        if curve is None:
            raise InputError("no kept curve of positive self-intersection to test against")
    value = EpsRational.lift(k_dot(S, curve))
    for c, a in boundary.items():
        value = value + a * q_intersection(S, c, curve)
    return value


def _contract_ray(extension: SurfaceModel, sigma: str) -> Tuple[Configuration, List[str]]:
    """Blows down ``sigma`` and then every exceptional curve that becomes a -1 curve."""
    cfg = extension.config.blow_down(sigma)
    remaining = set(extension.exceptional)
    blown = [sigma]
    while True:
        minus_one = next(
            (c for c in cfg.curves if c in remaining and cfg.curve(c).is_minus_one), None
        )
        if minus_one is None:
            return cfg, blown
        cfg = cfg.blow_down(minus_one)
        remaining.discard(minus_one)
        blown.append(minus_one)


def _contracted_surface(extension: SurfaceModel, sigma: str) -> Tuple[SurfaceModel, List[str]]:
    try:
        cfg, blown = _contract_ray(extension, sigma)
        remaining = frozenset(c for c in extension.exceptional if c not in blown)
        return contract_to_surface(cfg, Policy(explicit=remaining)), blown
    except (NotMinusOne, NotNegativeDefinite, NotLogTerminal, UnrecognizedGraph) as e:
        raise ContractionNotLT(
            "contracting {} does not give a log terminal surface: {}".format(sigma, e),
            diagnostics={"curve": sigma},
        ) from e


def _check_pushforward(
    extension: SurfaceModel,
    scaled: Boundary,
    contracted: SurfaceModel,
    following: Boundary,
    step: int,
):
    """
    ``K_T + Γ'`` is the pullback of ``K_S + Δ``: curves exceptional on both surfaces keep
    their coefficients.
    """
    before = exceptional_coefficients(extension, scaled)
    for curve, value in exceptional_coefficients(contracted, following).items():
        if before.get(curve, value) != value:
            raise PushforwardMismatch(
                "coefficient of {} is {} over T but {} over S".format(
                    curve, before[curve], value
                ),
                diagnostics={"curve": curve, "step": step},
            )


def _check_hunt_from_empty(
    state: HuntState,
    extension: SurfaceModel,
    gamma: Boundary,
    contracted: SurfaceModel,
    following: Boundary,
    extracted: Sequence[str],
):
    """Hunts started from the empty boundary: flush after the first step, ordered after each."""
    if state.step == 0:
        for name, surface, boundary in (
            ("T", extension, gamma),
            ("S", contracted, following),
        ):
            flush = is_flush(surface, boundary)
            if not flush:
                raise FlushnessLost(
                    "{}1 is not flush at {}".format(name, flush.witness),
                    diagnostics={"witness": flush.witness, "coefficient": flush.coefficient},
                )
    kept = [following.coefficient(c) for c in extracted if following.coefficient(c)]
    for earlier, later in zip(kept, kept[1:]):
        if later >= earlier:
            raise MonotonicityViolation(
                "coefficients of extracted curves are not decreasing: {}".format(
                    ", ".join(str(v) for v in kept)
                ),
                diagnostics={"step": state.step + 1},
            )


class Hunt:
    """
    Hunt engine. Every operation is registered with :class:`tigerhunt.base.API` so plugins
    see ``pre_<op>`` and ``post_<op>`` calls around it.

    :param plugins: list of :class:`tigerhunt.plugins.BasePlugin` instances. Default is an
        empty list.
    :param max_steps: int default limit for :meth:`run`. Default is 10.
    """

    def __init__(self, plugins=None, max_steps: int = DEFAULT_MAX_STEPS):
        self.plugins = plugins or []
        self.max_steps = max_steps

    @API.register
    @API.plugins
    def select(self, surface: SurfaceModel, boundary: Boundary) -> str:
        """
        Exceptional curve of the minimal resolution with maximal ``e(E, K + Δ)``. Among
        ties a star center wins, then a curve of weight at least 3, then configuration
        order.

        :raises: :class:`tigerhunt.exceptions.SmoothSurface`
        """
        if surface.is_smooth:
            raise SmoothSurface("surface has no singular point to extract from")
        coefficients = exceptional_coefficients(surface, boundary)
        best = max(coefficients.values())
        tied = [c for c in surface.config.curves if coefficients.get(c) == best]
        for curve in tied:
            point = surface.point_of(curve)
            if isinstance(point.graph, StarSingularity) and point.curves[0] == curve:
                return curve
        heavy = [c for c in tied if surface.point_of(c).weight(c) >= 3]
        return (heavy or tied)[0]

    @API.register
    @API.plugins
    def scale(
        self,
        extension: SurfaceModel,
        gamma: Boundary,
        divisor: str,
        ray: str,
        epsilon: bool = True,
    ) -> Tuple[Optional[EpsRational], Boundary]:
        """
        Returns ``λ`` and ``Γ' = λ·(Γ + εE)`` with ``(K + Γ')·R = 0``. When ``Γ·R`` has
        no standard part and ``Γ`` is empty, ``λ`` is infinite: ``None`` is returned
        and ``Γ' = a·E`` with ``a = -K·R / E·R``.

        ``λ > 1`` when ``(K + Γ_ε)·R < 0``; without ε, ``K + Γ`` is numerically trivial and
        ``λ = 1``.

        :param epsilon: add the formal ε to ``E``; pass False when ``K + Δ`` is
            numerically trivial.
        :raises: :class:`tigerhunt.exceptions.RayNotNegative` unless ``K·R < 0`` and
            ``(K + Γ_ε)·R <= 0``,
            :class:`tigerhunt.exceptions.DegenerateRay`,
            :class:`tigerhunt.exceptions.ScaleOutOfRange`
        """
        k = k_dot(extension, ray)
        if k >= 0:
            raise RayNotNegative("K·{} = {} is not negative".format(ray, k))
        bumped = gamma.with_coefficient(
            divisor, gamma.coefficient(divisor) + (EPSILON if epsilon else ZERO)
        )
        g = ZERO
        for curve, value in bumped.items():
            g = g + value * q_intersection(extension, curve, ray)
        if k + g > 0:
            raise RayNotNegative(
                "(K + Γ_ε)·{} = {} is positive".format(ray, k + g),
                diagnostics={"ray": ray, "value": k + g},
            )
        if not g:
            raise DegenerateRay("boundary does not meet {}".format(ray))
        if not g.std:
            if any(value.std for _, value in gamma.items()):
                raise DegenerateRay(
                    "boundary meets {} only infinitesimally".format(ray),
                    diagnostics={"ray": ray},
                )
            a = -k / q_intersection(extension, divisor, ray)
            return None, Boundary({divisor: a}, check=False)
        lam = EpsRational.lift(-k) / g
        if (epsilon and lam <= 1) or (not epsilon and lam != 1):
            raise ScaleOutOfRange(
                "λ = {} along {}".format(lam, ray), diagnostics={"ray": ray, "lambda": lam}
            )
        return lam, bumped.scaled(lam)

    @API.register
    @API.plugins
    def find_extremal(self, extension: SurfaceModel, divisor: str) -> Extremal:
        """
        Scans the kept curves other than ``divisor``: a K-negative curve of negative
        self-intersection whose contraction is log terminal spans a birational ray, one of
        self-intersection zero a fibration. Curves meeting ``divisor`` are tried first.
        """
        sigma: List[str] = []
        fibre: List[str] = []
        for curve in extension.kept:
            if curve == divisor or k_dot(extension, curve) >= 0:
                continue
            q = q_self(extension, curve)
            if q < 0:
                sigma.append(curve)
            elif q == 0:
                fibre.append(curve)

        def apart(curve):
            return q_intersection(extension, curve, divisor) <= 0

        for curve in sorted(sigma, key=apart):
            try:
                _contracted_surface(extension, curve)
            except ComputationError as e:
                logger.debug("ray candidate %s rejected: %s", curve, e)
                continue
            return Sigma(curve)
        if fibre:
            return Fibre(sorted(fibre, key=apart)[0])
        return Unresolved("no tracked K-negative curve spans the second extremal ray")

    @API.register
    @API.plugins
    def step(self, state: HuntState) -> Union[HuntState, NetOutcome]:
        """
        One hunt step from ``(S_i, Δ_i)``.

        :raises: :class:`tigerhunt.exceptions.UnresolvedRay`,
            :class:`tigerhunt.exceptions.ContractionNotLT`,
            :class:`tigerhunt.exceptions.MonotonicityViolation`
        """
        start = time.monotonic()
        surface, boundary = state.surface, state.boundary
        divisor = self.select(surface, boundary)
        point = surface.point_of(divisor)
        coefficient = exceptional_coefficients(surface, boundary)[divisor]
        trivial = not k_plus_delta_degree(surface, boundary)

        extension = surface.extract(divisor)
        gamma = log_pullback(surface, boundary, [divisor])
        ray = self.find_extremal(extension, divisor)
        if isinstance(ray, Unresolved):
            raise UnresolvedRay(ray.reason, diagnostics={"extracted": divisor})
        lam, scaled = self.scale(extension, gamma, divisor, ray.curve, epsilon=not trivial)

        if isinstance(ray, Fibre):
            record = HuntRecord(
                state.step + 1,
                divisor,
                point.name,
                coefficient,
                lam,
                ray,
                scaled,
                tuple(str(g) for g in extension.singularities()),
            )
            logger.debug(
                "HUNT-STEP %d extracted %s, net over %s (%.4f)s",
                record.step,
                divisor,
                ray.curve,
                time.monotonic() - start,
            )
            return NetOutcome(state, extension, ray.curve, scaled, record)

        contracted, blown = _contracted_surface(extension, ray.curve)
        following = scaled.without(*blown).checked()
        _check_pushforward(extension, scaled, contracted, following, state.step + 1)
        extracted = [r.extracted for r in state.log] + [divisor]
        if set(boundary.support) <= set(extracted):
            _check_hunt_from_empty(state, extension, gamma, contracted, following, extracted)
        if not trivial:
            for curve, value in boundary.items():
                if curve in blown:
                    continue
                if following.coefficient(curve) <= value:
                    raise MonotonicityViolation(
                        "coefficient of {} went from {} to {}".format(
                            curve, value, following.coefficient(curve)
                        ),
                        diagnostics={"curve": curve, "step": state.step + 1},
                    )
        record = HuntRecord(
            state.step + 1,
            divisor,
            point.name,
            coefficient,
            lam,
            ray,
            following,
            tuple(str(g) for g in contracted.singularities()),
        )
        logger.debug(
            "HUNT-STEP %d extracted %s (%.4f)s", record.step, divisor, time.monotonic() - start
        )
        return HuntState(contracted, following, record.step, state.log + (record,))

    @API.register
    @API.plugins
    def run(
        self,
        surface: SurfaceModel,
        boundary: Optional[Boundary] = None,
        max_steps: Optional[int] = None,
    ) -> HuntResult:
        """
        Iterates :meth:`step` from ``(surface, boundary)`` until a net, an unresolved ray,
        a smooth surface or ``max_steps``.

        :raises: :class:`tigerhunt.exceptions.InputError` if ``K + Δ`` is not anti-ample
            or numerically trivial.
        """
        max_steps = self.max_steps if max_steps is None else max_steps
        if max_steps < 1:
            raise InputError("max_steps must be at least 1")
        boundary = boundary if boundary is not None else Boundary()
        if not surface.is_smooth and k_plus_delta_degree(surface, boundary) > 0:
            raise InputError("K + Δ is not anti-ample")

        states = [HuntState(surface, boundary)]
        while True:
            current = states[-1]
            if current.surface.is_smooth:
                return HuntResult(tuple(states), StopReason.SMOOTH)
            if current.step >= max_steps:
                return HuntResult(tuple(states), StopReason.STEP_LIMIT)
            try:
                following = self.step(current)
            except UnresolvedRay as e:
                return HuntResult(tuple(states), StopReason.UNRESOLVED, detail=str(e))
            if isinstance(following, NetOutcome):
                return HuntResult(tuple(states), StopReason.NET, net=following)
            states.append(following)


_default = Hunt()


def select_hunt_divisor(surface: SurfaceModel, boundary: Optional[Boundary] = None) -> str:
    return _default.select(surface, boundary if boundary is not None else Boundary())


def scale(extension: SurfaceModel, gamma: Boundary, divisor: str, ray: str, epsilon=True):
    return _default.scale(extension, gamma, divisor, ray, epsilon=epsilon)


def find_extremal(extension: SurfaceModel, divisor: str) -> Extremal:
    return _default.find_extremal(extension, divisor)


def hunt_step(state: HuntState) -> Union[HuntState, NetOutcome]:
    return _default.step(state)


def run_hunt(
    surface: SurfaceModel,
    max_steps: int = DEFAULT_MAX_STEPS,
    boundary: Optional[Boundary] = None,
) -> HuntResult:
    return _default.run(surface, boundary, max_steps=max_steps)


def gamma_sequence(result: HuntResult) -> List[Tuple[str, Fraction]]:
    """
    ``m_{i+1} = e(E_{i+1}, K_{S_i} + γ_i)`` with ``γ_i = Σ_{j<=i} m_j·E_j``, recomputed on
    the surfaces of a hunt.
    """
    sequence: List[Tuple[str, Fraction]] = []
    gamma = Boundary(check=False)
    for state, record in zip(result.states, result.log):
        surface = state.surface
        gamma = Boundary(
            {c: v for c, v in gamma.items() if c in surface.kept}, check=False
        )
        m = exceptional_coefficients(surface, gamma)[record.extracted]
        sequence.append((record.extracted, m.std))
        gamma = gamma.with_coefficient(record.extracted, m)
    return sequence


def local_gamma_sequence(
    e0: RationalLike, steps: Sequence[Tuple[str, Sequence[int]]]
) -> List[Fraction]:
    """
    γ coefficients from chain data alone. Each step names the chain of ``x_i`` with its
    extracted curve marked (``"3,2,2@L"``) and the 1-based positions of the earlier γ
    components that meet the marked curve normally.
    """
    sequence = [as_rational(e0)]
    for text, meeting in steps:
        chain = ChainSingularity.parse(text)
        vertex = chain.length - 1 if chain.marked == (False, True) else 0
        total = Fraction(0)
        for j in meeting:
            if not 1 <= j <= len(sequence):
                raise InputError("no γ component {} yet".format(j))
            total += sequence[j - 1]
        edges = [(i, i + 1) for i in range(chain.length - 1)]
        solved = germ_coefficients(chain.weights, edges, {vertex: total})
        sequence.append(as_rational(solved[vertex]))
    return sequence
