"""
Sufficient certificates about rank one log del Pezzo surfaces: the Riemann-Roch tiger
bound, the Bogomolov inequality, the uniruledness inequality, flush bounds at smooth points,
the klt bound at normal crossings and the toric K² experiment.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from tigerhunt.exact import RationalLike, as_rational
from tigerhunt.exceptions import InputError
from tigerhunt.singularity import different_coefficients
from tigerhunt.surface.configuration import Configuration, Curve
from tigerhunt.surface.model import SurfaceModel, contract_to_surface, k_squared
from tigerhunt.surface.pairs import Boundary, is_flush, log_resolution

logger = logging.getLogger(__name__)

RATIONAL_E_TOP = 3


@dataclass(frozen=True)
class PointStats:
    name: str
    gamma: Fraction
    delta: Fraction
    w: int


@dataclass(frozen=True)
class RRStats:
    n: int
    k_squared_tilde: int
    w: int
    gamma: Fraction
    per_point: Tuple[PointStats, ...] = ()


def rr_chi(S: SurfaceModel) -> Tuple[Fraction, RRStats]:
    """
    ``χ = 1 - n + K²(S̃) + Σ w(t)`` over the non Du Val points t, with
    ``w(t) = Σ (w_j - 2)``, ``Γ(t) = Σ (1 - e_j)(w_j - 2)`` and ``δ(t) = w(t) - Γ(t)``.
    """
    per_point = []
    for point in S.points:
        if point.is_du_val:
            continue
        w = gamma = 0
        for curve, e in zip(point.curves, point.discrepancies):
            weight = point.weight(curve)
            w += weight - 2
            gamma += (1 - e) * (weight - 2)
        gamma = Fraction(gamma)
        per_point.append(PointStats(point.name, gamma, w - gamma, w))
    total_w = sum(p.w for p in per_point)
    stats = RRStats(
        n=len(per_point),
        k_squared_tilde=S.config.k_squared_smooth,
        w=total_w,
        gamma=sum((p.gamma for p in per_point), Fraction(0)),
        per_point=tuple(per_point),
    )
    chi = Fraction(1 - stats.n + stats.k_squared_tilde + total_w)
    return chi, stats


def tiger_certificate(S: SurfaceModel) -> Optional[str]:
    """
    A reason why ``K_S`` has a tiger, or None when neither sufficient condition applies.
    None is inconclusive.
    """
    if k_squared(S) > 4:
        return "K² = {} > 4".format(k_squared(S))
    n = sum(1 for p in S.points if not p.is_du_val)
    if n <= 1:
        return "{} non Du Val point(s): |-K - D| is non-empty".format(n)
    coefficient = max((p.coefficient for p in S.points), default=Fraction(0))
    if n == 2 and coefficient <= Fraction(1, 2):
        return "two non Du Val points and e(S) = {} <= 1/2".format(coefficient)
    return None


def boundary_e_top(components: int) -> int:
    """Euler number of a connected genus 0 boundary with ``components`` components."""
    return 1 + components if components else 0


def bogomolov_check(
    indices: Sequence[int], e_top_s: int = RATIONAL_E_TOP, e_top_b: int = 0
) -> bool:
    """``Σ (r_p - 1)/r_p <= e(S) - e(B)`` over the singular points off the boundary."""
    return sum(different_coefficients(indices), Fraction(0)) <= e_top_s - e_top_b


def uniruled_criterion(kz: RationalLike, x: int, y: int) -> bool:
    """``-K·Z >= 1/x + 1/y`` for a rational curve Z with two branches of indices x, y."""
    if x < 1 or y < 1:
        raise InputError("branch indices must be positive")
    return as_rational(kz) >= Fraction(1, x) + Fraction(1, y)


@dataclass(frozen=True)
class Mult:
    """``multiplicity`` smooth transversal branches of coefficient ``a``."""

    multiplicity: int
    a: Fraction


@dataclass(frozen=True)
class Node:
    """Two smooth branches of coefficients ``a >= b`` with contact order ``genus``."""

    genus: int
    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class Cusp:
    """Unibranch double point of order ``genus`` on a curve of coefficient ``a``."""

    genus: int
    a: Fraction


SmoothPointKind = Union[Mult, Node, Cusp]


def _local_surface(kind: SmoothPointKind) -> Tuple[SurfaceModel, Boundary]:
    cfg = Configuration.abstract()
    if isinstance(kind, Mult):
        names = ["D{}".format(i) for i in range(1, kind.multiplicity + 1)]
        for name in names:
            cfg = cfg.with_curve(Curve(name, 1, -3))
        for a, b in combinations(names, 2):
            cfg = cfg.with_intersection(a, b, 1)
        cfg = cfg.with_point("p", [(name, ()) for name in names])
        return contract_to_surface(cfg), Boundary({n: kind.a for n in names})
    if isinstance(kind, Node):
        cfg = cfg.with_curve(Curve("X", 1, -3)).with_curve(Curve("Y", 1, -3))
        cfg = cfg.with_intersection("X", "Y", kind.genus)
        cfg = cfg.with_point("p", [("X", ()), ("Y", ())], {(0, 1): kind.genus})
        return contract_to_surface(cfg), Boundary({"X": kind.a, "Y": kind.b})
    cfg = cfg.with_curve(Curve("X", 9, -3))
    cfg = cfg.with_point("p", [("X", (2,) * kind.genus)])
    return contract_to_surface(cfg), Boundary({"X": kind.a})


def _coefficients(kind: SmoothPointKind) -> Tuple[Fraction, ...]:
    if isinstance(kind, Node):
        return (kind.a, kind.b)
    return (kind.a,)


def smooth_point_flush_bounds(kind: SmoothPointKind, m: Optional[RationalLike] = None) -> bool:
    """
    The necessary inequality a flush pair satisfies at a smooth point of its boundary.

    The first blow up gives ``Σ a_i·M_i - 1 < m``, which is ``(M - 1)·a < 1`` for ``M``
    transversal branches of coefficient ``a = m``. Nodes of genus at least two add
    ``2a + b < 2`` (``a >= b``) and ordinary cusps add ``a < 4/5``. ``m`` defaults to the
    smallest non-zero coefficient of the kind.
    """
    if m is None:
        m = min((c for c in _coefficients(kind) if c), default=Fraction(1))
    m = as_rational(m)
    if isinstance(kind, Mult):
        return kind.multiplicity * kind.a - 1 < m
    if isinstance(kind, Node):
        a, b = max(kind.a, kind.b), min(kind.a, kind.b)
        return a + b - 1 < m and (kind.genus < 2 or 2 * a + b < 2)
    return 2 * kind.a - 1 < m and (kind.genus != 1 or kind.a < Fraction(4, 5))


def smooth_point_is_flush(kind: SmoothPointKind) -> bool:
    """Whether the local configuration is flush at its smooth point, on the log resolution."""
    S, boundary = _local_surface(kind)
    return is_flush(S, boundary).ok


def local_klt_bound(a: RationalLike, b: RationalLike, mp: RationalLike) -> bool:
    """``max(a, b) + m_p < 1``: klt at a normal crossing of coefficients a, b."""
    a, b, mp = as_rational(a), as_rational(b), as_rational(mp)
    if a < 0 or b < 0 or mp < 0:
        raise InputError("coefficients and multiplicity must be non-negative")
    return max(a, b) + mp < 1


@dataclass(frozen=True)
class KltCertificate:
    ok: bool
    multiplicity: Fraction
    bounds: Dict[str, Fraction] = field(default_factory=dict)
    crossings: Tuple[Tuple[str, str, bool], ...] = ()


def line_multiplicity_bound(boundary: Boundary, degrees: Mapping[str, int]) -> Fraction:
    """``3 - Σ a_i·d_i``: bounds the multiplicity of α with ``K + Δ + α ≡ 0`` on P²."""
    total = Fraction(3)
    for curve, value in boundary.items():
        if curve not in degrees:
            raise InputError("no degree for {}".format(curve))
        total -= as_rational(value.std) * degrees[curve]
    return total


def klt_certificate(S: SurfaceModel, boundary: Boundary, m: RationalLike) -> KltCertificate:
    """
    Bounds ``K + Δ + α`` where α has multiplicity at most ``m`` everywhere: blows up to a
    log resolution, adding ``m`` to the coefficient of every new curve, then requires
    ``max(a, b) + m < 1`` at every crossing and on every component.
    """
    if not S.is_smooth:
        raise InputError("the klt certificate works on smooth surfaces")
    m = as_rational(m)
    cfg = log_resolution(S, boundary.support)
    bounds: Dict[str, Fraction] = {c: boundary.coefficient(c).std for c in S.kept}
    for record in cfg.history[len(S.config.history):]:
        value = m - 1
        for curve, mult in record.multiplicities.items():
            value += bounds.get(curve, Fraction(0)) * mult
        bounds[record.curve] = value

    positive = [c for c in cfg.curves if bounds.get(c, 0) > 0]
    crossings = []
    for a, b in combinations(positive, 2):
        if cfg.intersection(a, b):
            crossings.append((a, b, local_klt_bound(bounds[a], bounds[b], m)))
    ok = all(bounds[c] + m < 1 for c in positive) and all(flag for _, _, flag in crossings)
    logger.debug("KLT-CERTIFICATE %s with m=%s", "ok" if ok else "fails", m)
    return KltCertificate(ok, m, bounds, tuple(crossings))


def toric_k2(p: int, q: int, r: int) -> Fraction:
    """K² of the rank one toric surface with singular points of indices p, q, r."""
    if min(p, q, r) < 1:
        raise InputError("toric indices must be positive")
    return Fraction((p + q + r) ** 2, p * q * r)


@dataclass(frozen=True)
class ToricFamily:
    r: int
    c: int
    q: int

    def __post_init__(self):
        if math.gcd(self.c, self.q) != 1:
            raise InputError("c and q must be coprime")
        if self.p <= 0:
            raise InputError("rc - q must be positive")

    @property
    def p(self) -> int:
        return self.r * self.c - self.q

    @property
    def indices(self) -> Tuple[int, int, int]:
        return (self.p, self.q, self.r)

    @property
    def k_squared(self) -> Fraction:
        return toric_k2(*self.indices)


def _nearest_family(r: int, q: int, target: Fraction) -> Optional[ToricFamily]:
    # K² = t solves p² + (2s - tqr)·p + s² = 0 with s = q + r; take the larger root.
    s = q + r
    b = target * q * r - 2 * s
    disc = b * b - 4 * s * s
    if disc < 0:
        return None
    p = (b + math.isqrt(math.floor(disc))) / 2
    c = max(1, round((p + q) / r))
    while math.gcd(c, q) != 1 or r * c - q <= 0:
        c += 1
    return ToricFamily(r, c, q)


def toric_density_sample(
    r: int,
    cap_q: int,
    exhaustive_q: int = 12,
    grid_step: RationalLike = Fraction(1, 20),
    k2_max: RationalLike = 20,
) -> List[ToricFamily]:
    """
    Toric families of index r, sorted by K². Every admissible ``(c, q)`` with
    ``q <= exhaustive_q`` and ``K² <= k2_max`` is listed; above that, each point of a
    ``grid_step`` grid of K² values gets the nearest family with ``q = cap_q``.
    """
    if r < 1 or cap_q < 1:
        raise InputError("r and cap_q must be positive")
    grid_step, k2_max = as_rational(grid_step), as_rational(k2_max)
    found: Dict[Tuple[int, int], ToricFamily] = {}
    for q in range(1, min(exhaustive_q, cap_q) + 1):
        c = q // r + 1
        while True:
            if math.gcd(c, q) == 1:
                family = ToricFamily(r, c, q)
                if family.k_squared > k2_max and family.p > q + r:
                    break
                if family.k_squared <= k2_max:
                    found[(c, q)] = family
            c += 1
    if cap_q > exhaustive_q:
        target = grid_step
        while target <= k2_max:
            family = _nearest_family(r, cap_q, target)
            if family is not None and family.k_squared <= k2_max:
                found[(family.c, family.q)] = family
            target += grid_step
    return sorted(found.values(), key=lambda f: (f.k_squared, f.q, f.c))
