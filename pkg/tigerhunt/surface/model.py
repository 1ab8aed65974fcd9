"""
Contraction of a smooth configuration to a normal surface, and Mumford's ℚ-valued
intersection theory on the result.
"""

import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from tigerhunt.exact import RatMatrix, as_rational, format_rational, is_negative_definite, solve
from tigerhunt.exceptions import (
    InputError,
    MultiplePoints,
    NotLogTerminal,
    NotNegativeDefinite,
    UnrecognizedGraph,
)
from tigerhunt.singularity import (
    ChainSingularity,
    SingularityGraph,
    StarSingularity,
    discrepancies,
    graph_matrix,
    star_det_abs,
)
from tigerhunt.surface.configuration import Configuration

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Policy:
    """
    Which curves ``contract_to_surface`` contracts. By default every curve with
    ``C² <= -2`` and ``K·C >= 0``, minus ``keep``; ``explicit`` overrides the default.
    """

    explicit: Optional[FrozenSet[str]] = None
    keep: FrozenSet[str] = field(default_factory=frozenset)

    def select(self, cfg: Configuration) -> List[str]:
        if self.explicit is not None:
            for name in self.explicit:
                cfg.curve(name)
            return [c for c in cfg.curves if c in self.explicit]
        return [
            name
            for name, curve in cfg.curves.items()
            if curve.is_k_nonnegative and name not in self.keep
        ]


Policy.K_NONNEGATIVE = Policy()


@dataclass(frozen=True)
class SingularPoint:
    name: str
    graph: SingularityGraph
    curves: Tuple[str, ...]
    discrepancies: Tuple[Fraction, ...]
    matrix: RatMatrix
    marked: Tuple[bool, bool] = (False, False)

    @property
    def coefficient(self) -> Fraction:
        return max(self.discrepancies)

    @property
    def index(self) -> int:
        if isinstance(self.graph, ChainSingularity):
            return self.graph.index
        return star_det_abs(self.graph)

    @property
    def is_du_val(self) -> bool:
        return self.graph.is_du_val

    @property
    def marked_graph(self) -> SingularityGraph:
        """The chain with its ends marked where a kept curve meets them; stars as they are."""
        if isinstance(self.graph, ChainSingularity):
            return ChainSingularity(self.graph.weights, self.marked)
        return self.graph

    def position(self, curve: str) -> int:
        return self.curves.index(curve)

    def discrepancy(self, curve: str) -> Fraction:
        return self.discrepancies[self.position(curve)]

    def weight(self, curve: str) -> int:
        if isinstance(self.graph, ChainSingularity):
            return self.graph.weights[self.position(curve)]
        weights, _ = self.graph.vertices()
        return weights[self.position(curve)]


@dataclass(frozen=True)
class SurfaceModel:
    """
    ``config`` is the minimal resolution (or a partial resolution when curves were
    extracted); ``exceptional`` the curves it contracts, grouped into ``points``.
    """

    config: Configuration
    exceptional: FrozenSet[str]
    points: Tuple[SingularPoint, ...]
    policy: Policy = Policy.K_NONNEGATIVE

    @property
    def kept(self) -> List[str]:
        return [c for c in self.config.curves if c not in self.exceptional]

    @property
    def is_smooth(self) -> bool:
        return not self.points

    @property
    def rho(self) -> int:
        return self.config.rho - len(self.exceptional)

    def point_of(self, curve: str) -> Optional[SingularPoint]:
        for point in self.points:
            if curve in point.curves:
                return point
        return None

    def point(self, name: str) -> SingularPoint:
        for point in self.points:
            if point.name == name:
                return point
        raise InputError("no singular point {}".format(name))

    def discrepancy(self, curve: str) -> Fraction:
        point = self.point_of(curve)
        return point.discrepancy(curve) if point else Fraction(0)

    def extract(self, curve: str) -> "SurfaceModel":
        """The partial resolution that keeps ``curve`` and contracts everything else."""
        if curve not in self.exceptional:
            raise InputError("{} is not contracted on this surface".format(curve))
        return contract_to_surface(self.config, Policy(explicit=self.exceptional - {curve}))

    def singularities(self) -> List[SingularityGraph]:
        return [p.graph for p in self.points]


@dataclass(frozen=True)
class Branch:
    """Local analytic branch of ``curve`` at ``point`` with its resolution incidences."""

    curve: str
    point: Optional[str]
    incidences: Tuple[Tuple[str, int], ...]


Target = Union[str, Branch, Mapping[str, int]]


def _orient_chain(sub: nx.Graph, names: Sequence[str], order: Mapping[str, int]) -> List[str]:
    if len(names) == 1:
        return list(names)
    ends = sorted((v for v in sub if sub.degree(v) == 1), key=order.get)
    path = nx.shortest_path(sub, ends[0], ends[1])
    weights = [-sub.nodes[v]["self_int"] for v in path]
    if weights[::-1] > weights:
        path.reverse()
    return path


def _recognize(
    cfg: Configuration, sub: nx.Graph, names, label: str, order, kept: Sequence[str]
) -> SingularPoint:
    for name in names:
        curve = cfg.curve(name)
        if curve.self_int > -2 or curve.k_deg != -2 - curve.self_int:
            raise UnrecognizedGraph(
                "{} (self-intersection {}, K-degree {}) is not a smooth rational curve "
                "of a minimal resolution".format(name, curve.self_int, curve.k_deg),
                diagnostics={"curve": name},
            )
    if any(data["weight"] > 1 for _, _, data in sub.edges(data=True)):
        raise UnrecognizedGraph("exceptional curves of {} meet more than once".format(label))
    if not nx.is_tree(sub):
        raise UnrecognizedGraph("exceptional curves of {} form a cycle".format(label))
    high = [v for v in sub if sub.degree(v) >= 3]
    if any(sub.degree(v) > 3 for v in high) or len(high) > 1:
        raise UnrecognizedGraph("exceptional graph of {} is neither chain nor star".format(label))

    if not high:
        curves = _orient_chain(sub, names, order)
        graph: SingularityGraph = ChainSingularity(tuple(-cfg.curve(c).self_int for c in curves))
        matrix = graph.matrix()
    else:
        center = high[0]
        rest = sub.copy()
        rest.remove_node(center)
        arms = []
        for start in sorted(sub.neighbors(center), key=order.get):
            arms.append(list(nx.dfs_preorder_nodes(rest, start)))
        try:
            graph = StarSingularity(
                -cfg.curve(center).self_int,
                tuple(ChainSingularity(tuple(-cfg.curve(c).self_int for c in a)) for a in arms),
            )
        except InputError as e:
            raise NotLogTerminal(str(e), diagnostics={"point": label}) from None
        curves = [center] + [c for arm in arms for c in arm]
        matrix = graph_matrix(*graph.vertices())

    data = discrepancies(graph)
    if max(data.e) >= 1:
        raise NotLogTerminal(
            "{} has a discrepancy >= 1".format(label),
            diagnostics={"point": label, "e": [format_rational(x) for x in data.e]},
        )
    marked = (False, False)
    if isinstance(graph, ChainSingularity):
        ends = [curves[0]] if len(curves) == 1 else [curves[0], curves[-1]]
        met = [any(cfg.intersection(end, k) for k in kept) for end in ends]
        marked = (met[0], len(met) > 1 and met[1])
    return SingularPoint(label, graph, tuple(curves), tuple(data.e), matrix, marked)


def contract_to_surface(cfg: Configuration, policy: Optional[Policy] = None) -> SurfaceModel:
    """
    :raises: :class:`tigerhunt.exceptions.NotNegativeDefinite`,
        :class:`tigerhunt.exceptions.UnrecognizedGraph`,
        :class:`tigerhunt.exceptions.NotLogTerminal`
    """
    start = time.monotonic()
    policy = policy or Policy.K_NONNEGATIVE
    exceptional = policy.select(cfg)
    order = {c: i for i, c in enumerate(cfg.curves)}
    if exceptional:
        matrix = RatMatrix.from_rows(
            [[cfg.intersection(a, b) for b in exceptional] for a in exceptional]
        )
        if not is_negative_definite(matrix):
            raise NotNegativeDefinite(
                "intersection form on {} is not negative definite".format(", ".join(exceptional)),
                diagnostics={"curves": exceptional},
            )
    graph = nx.Graph()
    for name in exceptional:
        graph.add_node(name, self_int=cfg.curve(name).self_int)
    for a, b in combinations(exceptional, 2):
        value = cfg.intersection(a, b)
        if value:
            graph.add_edge(a, b, weight=value)
    components = sorted(
        (sorted(c, key=order.get) for c in nx.connected_components(graph)),
        key=lambda c: order[c[0]],
    )
    kept = [c for c in cfg.curves if c not in graph]
    points = tuple(
        _recognize(cfg, graph.subgraph(names), names, "x{}".format(i), order, kept)
        for i, names in enumerate(components)
    )
    logger.debug(
        "CONTRACT %s (%.4f)s",
        " ".join(str(p.graph) for p in points) or "nothing",
        time.monotonic() - start,
    )
    return SurfaceModel(cfg, frozenset(exceptional), points, policy)


def _incidences(S: SurfaceModel, target: Target) -> Dict[str, object]:
    if isinstance(target, Branch):
        return dict(target.incidences)
    if isinstance(target, Mapping):
        return dict(target)
    if target in S.exceptional:
        raise InputError("{} is contracted on this surface".format(target))
    return {e: S.config.intersection(target, e) for e in S.exceptional}


def pullback_on(point: SingularPoint, incidences: Mapping[str, object]) -> Tuple:
    """Solves ``M·c = -v`` on one point; entries of ``v`` may be EpsRationals."""
    rhs = [-incidences.get(c, 0) for c in point.curves]
    if not any(rhs):
        return tuple(Fraction(0) for _ in point.curves)
    return solve(point.matrix, rhs)


def mumford_pullback(S: SurfaceModel, target: Target) -> Dict[str, Fraction]:
    """Coefficients ``c`` over the exceptional curves with ``(C̃ + Σ c·E)·E_j = 0``."""
    incidences = _incidences(S, target)
    result: Dict[str, Fraction] = {}
    for point in S.points:
        result.update(zip(point.curves, pullback_on(point, incidences)))
    return result


def q_intersection(S: SurfaceModel, c: str, d: str) -> Fraction:
    cfg = S.config
    pullback = mumford_pullback(S, c)
    return Fraction(cfg.intersection(c, d)) + sum(
        (value * cfg.intersection(e, d) for e, value in pullback.items()), Fraction(0)
    )


def q_self(S: SurfaceModel, c: str) -> Fraction:
    return q_intersection(S, c, c)


def k_dot(S: SurfaceModel, c: str) -> Fraction:
    cfg = S.config
    if c in S.exceptional:
        raise InputError("{} is contracted on this surface".format(c))
    return Fraction(cfg.curve(c).k_deg) + sum(
        (S.discrepancy(e) * cfg.intersection(e, c) for e in S.exceptional), Fraction(0)
    )


def k_squared(S: SurfaceModel) -> Fraction:
    cfg = S.config
    return Fraction(cfg.k_squared_smooth) + sum(
        (S.discrepancy(e) * cfg.curve(e).k_deg for e in S.exceptional), Fraction(0)
    )


def k_squared_identity_holds(S: SurfaceModel, c: str) -> bool:
    """``K² · C² = (K·C)²``, which holds for every curve when ρ = 1."""
    return k_squared(S) * q_self(S, c) == k_dot(S, c) ** 2


def branches(S: SurfaceModel, curve: str) -> List[Branch]:
    """
    Branches of ``curve`` at the singular points. Tracked germs keep their shared incidences;
    the rest of ``C̃·E`` is assumed to come from separate transversal branches.
    """
    cfg = S.config
    tracked: Dict[str, int] = defaultdict(int)
    found: List[Branch] = []
    for name, cluster in cfg.points.items():
        for g in cfg.germs_of(curve, name):
            incidences: Dict[str, int] = defaultdict(int)
            for h in cluster.germs:
                other = cfg.germs[h].curve
                if h != g and other in S.exceptional:
                    incidences[other] += cluster.contact(g, h)
            if not incidences:
                continue
            owners = {S.point_of(e).name for e in incidences}
            if len(owners) > 1:
                raise MultiplePoints("branch of {} at {} spans {}".format(curve, name, owners))
            for e, n in incidences.items():
                tracked[e] += n
            found.append(Branch(curve, owners.pop(), tuple(sorted(incidences.items()))))
    for point in S.points:
        for e in point.curves:
            for _ in range(cfg.intersection(curve, e) - tracked[e]):
                found.append(Branch(curve, point.name, ((e, 1),)))
    names = [p.name for p in S.points]
    return sorted(found, key=lambda b: names.index(b.point))


def branch_index(S: SurfaceModel, target: Union[Branch, Mapping[str, int]]) -> int:
    """
    Local Cartier index of a branch: lcm of the denominators of its pullback.

    :raises: :class:`tigerhunt.exceptions.MultiplePoints`
    """
    incidences = _incidences(S, target)
    incidences = {e: n for e, n in incidences.items() if n}
    if not incidences:
        return 1
    owners = {}
    for e in incidences:
        point = S.point_of(e)
        if point is None:
            raise InputError("{} is not contracted on this surface".format(e))
        owners[point.name] = point
    if len(owners) > 1:
        raise MultiplePoints("incidences lie over {}".format(sorted(owners)))
    (point,) = owners.values()
    coefficients = pullback_on(point, incidences)
    return math.lcm(*(as_rational(c).denominator for c in coefficients))


def surface_report(S: SurfaceModel) -> Dict:
    points = []
    for point in S.points:
        entry = {
            "name": point.name,
            "graph": str(point.graph),
            "curves": list(point.curves),
            "discrepancies": [format_rational(e) for e in point.discrepancies],
            "coefficient": format_rational(point.coefficient),
        }
        if isinstance(point.graph, ChainSingularity):
            entry["weights"] = list(point.graph.weights)
            entry["marked"] = str(point.marked_graph)
            entry["index"] = point.index
        else:
            entry["det_abs"] = point.index
        points.append(entry)
    curves = {}
    for name in S.kept:
        curves[name] = {
            "selfint": S.config.curve(name).self_int,
            "kdeg": format_rational(k_dot(S, name)),
            "qself": format_rational(q_self(S, name)),
        }
    return {
        "singularities": points,
        "kSquared": format_rational(k_squared(S)),
        "rho": S.rho,
        "curves": curves,
    }
