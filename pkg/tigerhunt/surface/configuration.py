"""
Smooth models obtained from P², a Hirzebruch surface or an abstract start by blowing up
points and infinitely near points. Points are clusters of smooth (or cuspidal) curve germs
with pairwise contact orders; blowing up follows the germs onto the new exceptional curve.
"""

import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from tigerhunt.exceptions import InconsistentCenter, InputError, NotMinusOne, UnknownCurve

logger = logging.getLogger(__name__)

Pair = FrozenSet[str]


def pair(a: str, b: str) -> Pair:
    return frozenset((a, b))


@dataclass(frozen=True)
class Curve:
    name: str
    self_int: int
    k_deg: int
    origin: str = "given"

    @property
    def is_minus_one(self) -> bool:
        return self.self_int == -1 and self.k_deg == -1

    @property
    def is_k_nonnegative(self) -> bool:
        return self.self_int <= -2 and self.k_deg >= 0


@dataclass(frozen=True)
class Germ:
    """
    Local branch of ``curve``. ``multiplicities`` lists the multiplicity at the point it
    currently sits on and the following infinitely near points; trailing 1s are dropped.
    """

    name: str
    curve: str
    multiplicities: Tuple[int, ...] = ()

    def __post_init__(self):
        mults = tuple(self.multiplicities)
        while mults and mults[-1] == 1:
            mults = mults[:-1]
        object.__setattr__(self, "multiplicities", mults)

    @property
    def multiplicity(self) -> int:
        return self.multiplicities[0] if self.multiplicities else 1

    def advanced(self) -> "Germ":
        return replace(self, multiplicities=self.multiplicities[1:])

    def prepended(self, multiplicity: int) -> "Germ":
        return replace(self, multiplicities=(multiplicity,) + self.multiplicities)


@dataclass(frozen=True)
class Cluster:
    name: str
    germs: Tuple[str, ...]
    contacts: Dict[Pair, int] = field(default_factory=dict)
    on: Optional[str] = None

    def contact(self, g: str, h: str) -> int:
        return self.contacts.get(pair(g, h), 0)


@dataclass(frozen=True)
class BlowupRecord:
    curve: str
    center: str
    multiplicities: Dict[str, int]
    step: int


@dataclass(frozen=True)
class Configuration:
    """
    Intersection data of a smooth projective surface. ``inter`` holds the off-diagonal
    intersection numbers of distinct curves; self-intersections live on the curves.
    Values are never mutated, every operation returns a new configuration.
    """

    curves: Dict[str, Curve] = field(default_factory=dict)
    inter: Dict[Pair, int] = field(default_factory=dict)
    germs: Dict[str, Germ] = field(default_factory=dict)
    points: Dict[str, Cluster] = field(default_factory=dict)
    history: Tuple[BlowupRecord, ...] = ()
    k_squared_smooth: int = 9
    rho: int = 1
    serial: int = field(default=0, compare=False)

    @classmethod
    def plane(cls) -> "Configuration":
        return cls(k_squared_smooth=9, rho=1)

    @classmethod
    def hirzebruch(cls, n: int) -> "Configuration":
        if n < 0:
            raise InputError("F_n needs n >= 0")
        return cls(k_squared_smooth=8, rho=2)

    @classmethod
    def abstract(cls, k_squared: int = 0, rho: int = 1) -> "Configuration":
        return cls(k_squared_smooth=k_squared, rho=rho)

    def curve(self, name: str) -> Curve:
        try:
            return self.curves[name]
        except KeyError:
            raise UnknownCurve(name) from None

    def intersection(self, a: str, b: str) -> int:
        if a == b:
            return self.curve(a).self_int
        return self.inter.get(pair(a, b), 0)

    def neighbours(self, name: str) -> Dict[str, int]:
        self.curve(name)
        return {
            other: self.inter[pair(name, other)]
            for other in self.curves
            if other != name and self.inter.get(pair(name, other), 0)
        }

    def germs_of(self, curve: str, point: str) -> List[str]:
        return [g for g in self.points[point].germs if self.germs[g].curve == curve]

    def points_on(self, curve: str) -> List[str]:
        return [p for p, cluster in self.points.items() if self.germs_of(curve, p)]

    def curves_at(self, point: str) -> Dict[str, int]:
        """Curves through ``point`` with their multiplicity there."""
        result: Dict[str, int] = defaultdict(int)
        for g in self.points[point].germs:
            germ = self.germs[g]
            result[germ.curve] += germ.multiplicity
        return dict(result)

    def point_meeting(self, *curves: str) -> str:
        for c in curves:
            self.curve(c)
        found = [p for p in self.points if all(self.germs_of(c, p) for c in curves)]
        if len(found) != 1:
            raise InconsistentCenter(
                "expected one tracked point on {}, found {}".format(" and ".join(curves), found)
            )
        return found[0]

    def tracked_contact(self, a: str, b: str) -> int:
        total = 0
        for name, cluster in self.points.items():
            for g in self.germs_of(a, name):
                for h in self.germs_of(b, name):
                    if g != h:
                        total += cluster.contact(g, h)
        return total

    def _next_serial(self) -> Tuple[int, "Configuration"]:
        serial = self.serial + 1
        return serial, replace(self, serial=serial)

    def with_curve(self, curve: Curve) -> "Configuration":
        if curve.name in self.curves:
            raise InputError("curve {} declared twice".format(curve.name))
        curves = dict(self.curves)
        curves[curve.name] = curve
        return replace(self, curves=curves)

    def with_intersection(self, a: str, b: str, value: int) -> "Configuration":
        self.curve(a)
        self.curve(b)
        if a == b:
            raise InputError("use the curve declaration for self-intersections")
        if value < 0:
            raise InputError("distinct curves cannot meet negatively")
        inter = dict(self.inter)
        inter[pair(a, b)] = value
        if not value:
            del inter[pair(a, b)]
        return replace(self, inter=inter)

    def with_point(
        self,
        name: str,
        germs: Iterable[Tuple[str, Tuple[int, ...]]],
        contacts: Optional[Mapping[Tuple[int, int], int]] = None,
        on: Optional[str] = None,
    ) -> "Configuration":
        """
        Adds a tracked point. ``germs`` are ``(curve, multiplicities)`` pairs and ``contacts``
        overrides the default contact ``m_g·m_h`` between germs given by position.
        """
        if name in self.points:
            raise InputError("point {} declared twice".format(name))
        cfg = self
        new_germs = dict(cfg.germs)
        names = []
        for curve, mults in germs:
            cfg.curve(curve)
            serial, cfg = cfg._next_serial()
            germ = Germ("{}.{}".format(curve, serial), curve, mults)
            new_germs[germ.name] = germ
            names.append(germ.name)
        table = {}
        for i, j in combinations(range(len(names)), 2):
            g, h = new_germs[names[i]], new_germs[names[j]]
            table[pair(g.name, h.name)] = g.multiplicity * h.multiplicity
        for (i, j), value in (contacts or {}).items():
            g, h = new_germs[names[i]], new_germs[names[j]]
            if value < g.multiplicity * h.multiplicity:
                raise InputError(
                    "contact {}:{}={} is below the product of multiplicities".format(
                        g.curve, h.curve, value
                    )
                )
            table[pair(names[i], names[j])] = value
        points = dict(cfg.points)
        points[name] = Cluster(name, tuple(names), table, on)
        return replace(cfg, germs=new_germs, points=points)

    def with_free_point(self, curve: str) -> Tuple["Configuration", str]:
        """A general point of ``curve``, away from every tracked point."""
        serial = self.serial + 1
        name = "{}:free{}".format(curve, serial)
        return self.with_point(name, [(curve, ())], on=curve), name

    def blow_up(self, point: str, name: Optional[str] = None) -> "Configuration":
        start = time.monotonic()
        try:
            cluster = self.points[point]
        except KeyError:
            raise InconsistentCenter("no tracked point {}".format(point)) from None
        step = len(self.history) + 1
        name = name or "E{}".format(step)
        if name in self.curves:
            raise InputError("curve {} declared twice".format(name))

        mult = {g: self.germs[g].multiplicity for g in cluster.germs}
        by_curve: Dict[str, int] = defaultdict(int)
        for g in cluster.germs:
            by_curve[self.germs[g].curve] += mult[g]

        curves = dict(self.curves)
        for c, m in by_curve.items():
            old = curves[c]
            curves[c] = replace(old, self_int=old.self_int - m * m, k_deg=old.k_deg + m)
        curves[name] = Curve(name, -1, -1, origin="blowup")

        inter = dict(self.inter)
        for a, b in combinations(by_curve, 2):
            value = inter.get(pair(a, b), 0) - by_curve[a] * by_curve[b]
            if value < 0:
                raise InconsistentCenter(
                    "{} and {} do not meet often enough at {}".format(a, b, point)
                )
            if value:
                inter[pair(a, b)] = value
            else:
                inter.pop(pair(a, b), None)
        for c, m in by_curve.items():
            inter[pair(name, c)] = m

        residual = {}
        for g, h in combinations(cluster.germs, 2):
            value = cluster.contact(g, h) - mult[g] * mult[h]
            if value < 0:
                raise InconsistentCenter(
                    "contact between {} and {} at {} is below the multiplicities".format(
                        self.germs[g].curve, self.germs[h].curve, point
                    )
                )
            residual[pair(g, h)] = value

        groups = _contact_groups(cluster.germs, residual)
        germs = dict(self.germs)
        for g in cluster.germs:
            germs[g] = germs[g].advanced()

        points = {k: v for k, v in self.points.items() if k != point}
        cfg = replace(self, curves=curves, inter=inter, germs=germs, points=points)
        for group in groups:
            for g, h in combinations(group, 2):
                if residual[pair(g, h)] < germs[g].multiplicity * germs[h].multiplicity:
                    raise InconsistentCenter(
                        "germs of {} and {} cannot share a point on {}".format(
                            germs[g].curve, germs[h].curve, name
                        )
                    )
            serial, cfg = cfg._next_serial()
            e_germ = Germ("{}.{}".format(name, serial), name)
            new_germs = dict(cfg.germs)
            new_germs[e_germ.name] = e_germ
            contacts = {pair(e_germ.name, g): mult[g] for g in group}
            contacts.update({pair(g, h): residual[pair(g, h)] for g, h in combinations(group, 2)})
            label = _point_label(cfg, name, germs[group[0]].curve)
            new_points = dict(cfg.points)
            new_points[label] = Cluster(label, (e_germ.name,) + tuple(group), contacts, name)
            cfg = replace(cfg, germs=new_germs, points=new_points)

        record = BlowupRecord(name, point, dict(by_curve), step)
        cfg = replace(
            cfg,
            history=self.history + (record,),
            k_squared_smooth=self.k_squared_smooth - 1,
            rho=self.rho + 1,
        )
        logger.debug("BLOWUP %s at %s (%.4f)s", name, point, time.monotonic() - start)
        return cfg

    def blow_down(self, name: str) -> "Configuration":
        start = time.monotonic()
        curve = self.curve(name)
        if not curve.is_minus_one:
            raise NotMinusOne(
                "{} has self-intersection {} and K-degree {}".format(
                    name, curve.self_int, curve.k_deg
                )
            )
        t = self.neighbours(name)

        curves = {k: v for k, v in self.curves.items() if k != name}
        for c, m in t.items():
            old = curves[c]
            curves[c] = replace(old, self_int=old.self_int + m * m, k_deg=old.k_deg - m)
        inter = {k: v for k, v in self.inter.items() if name not in k}
        for a, b in combinations(t, 2):
            inter[pair(a, b)] = inter.get(pair(a, b), 0) + t[a] * t[b]

        on_curve = self.points_on(name)
        germs = {k: v for k, v in self.germs.items() if v.curve != name}
        merged: List[str] = []
        weight: Dict[str, int] = {}
        same_point: Dict[Pair, int] = {}
        tracked: Dict[str, int] = defaultdict(int)
        for p in on_curve:
            cluster = self.points[p]
            own = [g for g in cluster.germs if self.germs[g].curve == name]
            others = [g for g in cluster.germs if self.germs[g].curve != name]
            for g in others:
                weight[g] = sum(cluster.contact(g, c) for c in own)
                tracked[self.germs[g].curve] += weight[g]
                germs[g] = self.germs[g].prepended(weight[g])
                merged.append(g)
            for g, h in combinations(others, 2):
                same_point[pair(g, h)] = cluster.contact(g, h)

        cfg = replace(self, curves=curves, inter=inter, germs=germs)
        for c, m in t.items():
            for _ in range(m - tracked.get(c, 0)):
                serial, cfg = cfg._next_serial()
                germ = Germ("{}.{}".format(c, serial), c)
                cfg.germs[germ.name] = germ
                weight[germ.name] = 1
                merged.append(germ.name)

        contacts = {}
        for g, h in combinations(merged, 2):
            contacts[pair(g, h)] = same_point.get(pair(g, h), 0) + weight[g] * weight[h]

        center = next((r.center for r in self.history if r.curve == name), None)
        label = center if center and center not in self.points else "{}:q".format(name)
        points = {k: v for k, v in self.points.items() if k not in on_curve}
        if merged:
            points[label] = Cluster(label, tuple(merged), contacts)

        history = self.history
        if history and history[-1].curve == name:
            history = history[:-1]
        cfg = replace(
            cfg,
            points=points,
            history=history,
            k_squared_smooth=self.k_squared_smooth + 1,
            rho=self.rho - 1,
        )
        logger.debug("BLOWDOWN %s (%.4f)s", name, time.monotonic() - start)
        return cfg

    def intersection_table(self) -> Dict[str, Dict[str, int]]:
        return {a: {b: self.intersection(a, b) for b in self.curves} for a in self.curves}


def _contact_groups(germs: Tuple[str, ...], residual: Mapping[Pair, int]) -> List[List[str]]:
    parent = {g: g for g in germs}

    def find(g):
        while parent[g] != g:
            parent[g] = parent[parent[g]]
            g = parent[g]
        return g

    for g, h in combinations(germs, 2):
        if residual[pair(g, h)] > 0:
            parent[find(g)] = find(h)
    groups: Dict[str, List[str]] = {}
    for g in germs:
        groups.setdefault(find(g), []).append(g)
    return list(groups.values())


def _point_label(cfg: Configuration, exceptional: str, curve: str) -> str:
    label = "{}:{}".format(exceptional, curve)
    n = 2
    while label in cfg.points:
        label = "{}:{}{}".format(exceptional, curve, n)
        n += 1
    return label
