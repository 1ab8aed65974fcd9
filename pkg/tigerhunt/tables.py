"""
Computed configuration tables: π-trivial boundaries of the local contractions over nodes and
cusps, the catalogue of multiple fibres of ℙ¹-fibrations, and low genus curves on
Hirzebruch surfaces.
"""

import logging
import math
import re
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from tigerhunt.exceptions import InputError
from tigerhunt.singularity import (
    ChainSingularity,
    SingularityGraph,
    StarSingularity,
    Verdict,
    classify_reduced_germ,
    discrepancies,
)
from tigerhunt.surface.configuration import Configuration, Curve
from tigerhunt.surface.model import Policy, contract_to_surface, k_dot, q_intersection
from tigerhunt.surface.pairs import Boundary, coefficient_of

logger = logging.getLogger(__name__)

NODE = "node"
CUSP = "cusp"
DEFAULT_FIBRE_DEPTH = 7
FIBRE_COEFFICIENT_BOUND = Fraction(2, 3)

Center = Union[str, Tuple[str, str]]


@dataclass(frozen=True)
class ContractionEntry:
    """``c_coefficient·c + d_coefficient·d = rhs``, normalised to coprime integers."""

    kind: str
    configuration: str
    genus: int
    c_coefficient: int
    d_coefficient: int
    rhs: int

    @property
    def c(self) -> Optional[Fraction]:
        if self.d_coefficient:
            return None
        return Fraction(self.rhs, self.c_coefficient)

    @property
    def constraint(self) -> str:
        if self.kind == CUSP:
            return "c = {}".format(self.c)
        terms = []
        for value, name in ((self.c_coefficient, "c"), (self.d_coefficient, "d")):
            if value:
                terms.append("{}{}".format(value if value != 1 else "", name))
        return "{} = {}".format(" + ".join(terms), self.rhs)

    def to_dict(self):
        return {
            "kind": self.kind,
            "configuration": self.configuration,
            "genus": self.genus,
            "constraint": self.constraint,
        }


def _e(k: int) -> str:
    return "E{}".format(k)


def _local_start(kind: str, genus: int) -> Configuration:
    cfg = Configuration.abstract()
    if kind == NODE:
        cfg = cfg.with_curve(Curve("X", 1, -3)).with_curve(Curve("Y", 1, -3))
        cfg = cfg.with_intersection("X", "Y", genus)
        return cfg.with_point("q", [("X", ()), ("Y", ())], {(0, 1): genus})
    cfg = cfg.with_curve(Curve("X", 9, -3))
    return cfg.with_point("q", [("X", (2,) * genus)])


def node_centers(genus: int, configuration: str) -> List[Center]:
    """Blow-up centers over a node of order ``genus``; ``(II,x^k)`` repeats the x step."""
    g = genus
    if configuration == "0":
        if g < 2:
            raise InputError("configuration 0 needs a node of order at least two")
        return ["q"] + [(_e(k), "X") for k in range(1, g - 1)]
    centers: List[Center] = ["q"] + [(_e(k), "X") for k in range(1, g)]
    if configuration == "I":
        return centers
    match = re.match(r"^\(II,x\^(\d+)\)$", configuration)
    if configuration != "II" and not match:
        raise InputError("unknown node configuration {!r}".format(configuration))
    if match and g != 1:
        raise InputError("(II,x^k) configurations occur over ordinary nodes only")
    extra = int(match.group(1)) if match else 0
    return centers + [(_e(k), "X") for k in range(g, g + extra + 1)]


def cusp_centers(genus: int, configuration: str) -> List[Center]:
    g = genus
    first: List[Center] = ["q"] + [(_e(k), "X") for k in range(1, g)]
    second = first + [(_e(g), "X")]
    third = second + [(_e(g + 1), _e(g))]
    sigma, after = _e(g + 2), _e(g + 3)
    u = third + [(sigma, _e(g))]
    v = third + [(sigma, "X")]
    recipes = {
        "I": first,
        "II": second,
        "III": third,
        "u": u,
        "v": v,
        "w": third + [(sigma, _e(g + 1))],
        "(u;n)": u + [(after, sigma)],
        "(v;f)": v + [(after, sigma)],
        "(v;f^2)": v + [(after, sigma), (_e(g + 4), sigma)],
        "(v;n)": v + [(after, "X")],
        "(v;n^2)": v + [(after, "X"), (_e(g + 4), "X")],
    }
    try:
        return recipes[configuration]
    except KeyError:
        raise InputError("unknown cusp configuration {!r}".format(configuration)) from None


def _apply(cfg: Configuration, centers: Sequence[Center]) -> Configuration:
    for step, center in enumerate(centers, start=1):
        point = center if isinstance(center, str) else cfg.point_meeting(*center)
        cfg = cfg.blow_up(point, _e(step))
    return cfg


def _normalised(values: Sequence[Fraction]) -> Tuple[int, ...]:
    scale = math.lcm(*(v.denominator for v in values))
    ints = [int(v * scale) for v in values]
    divisor = math.gcd(*ints) or 1
    return tuple(i // divisor for i in ints)


def contraction_entry(kind: str, genus: int, configuration: str) -> ContractionEntry:
    """
    Builds the local blow-up configuration, contracts every exceptional curve but the last
    one, Σ, and solves ``(K + cX + dY)·Σ = 0``.
    """
    if genus < 1:
        raise InputError("genus must be positive")
    start = time.monotonic()
    centers = (node_centers if kind == NODE else cusp_centers)(genus, configuration)
    cfg = _apply(_local_start(kind, genus), centers)
    sigma = _e(len(centers))
    contracted = frozenset(_e(k) for k in range(1, len(centers)))
    T = contract_to_surface(cfg, Policy(explicit=contracted))
    values = [
        q_intersection(T, "X", sigma),
        q_intersection(T, "Y", sigma) if kind == NODE else Fraction(0),
        -k_dot(T, sigma),
    ]
    c_coefficient, d_coefficient, rhs = _normalised(values)
    logger.debug(
        "CONTRACTION %s %s g=%d (%.4f)s", kind, configuration, genus, time.monotonic() - start
    )
    return ContractionEntry(kind, configuration, genus, c_coefficient, d_coefficient, rhs)


def contraction_tables(
    genera: Sequence[int] = (1, 2, 3), max_r: int = 4
) -> List[ContractionEntry]:
    """Every node and cusp configuration that survives the log terminal analysis."""
    entries = []
    for g in genera:
        names = (["0"] if g >= 2 else []) + ["I", "II"]
        if g == 1:
            names += ["(II,x^{})".format(r - 1) for r in range(2, max_r + 1)]
        entries.extend(contraction_entry(NODE, g, name) for name in names)
    for g in genera:
        names = ["I", "II", "III"]
        if g <= 2:
            names += ["u", "v"]
        if g == 1:
            names += ["w", "(u;n)", "(v;f)", "(v;f^2)", "(v;n)", "(v;n^2)"]
        entries.extend(contraction_entry(CUSP, g, name) for name in names)
    return entries


def type_one_coefficient(kind: str, genus: int, c, d=0) -> Fraction:
    """``e(E, K + cX + dY)`` for the -1 curve E of configuration I."""
    cfg = _local_start(kind, genus)
    S = contract_to_surface(cfg)
    coefficients = {"X": c, "Y": d} if kind == NODE else {"X": c}
    resolved = _apply(cfg, (node_centers if kind == NODE else cusp_centers)(genus, "I"))
    return coefficient_of(S, Boundary(coefficients), _e(genus), config=resolved).std


@dataclass(frozen=True)
class FibreEntry:
    """
    A multiple fibre: the singular points along G (each curve met by G̃ primed), the
    multiplicity of G, whether ``K_T + G`` is lt, and the coefficient ``e(T)``.
    ``components`` lists ``(self-intersection, multiplicity)`` along the fibre when its dual
    graph is a chain.
    """

    points: Tuple[str, ...]
    multiplicity: int
    lt: bool
    coefficient: Fraction
    components: Optional[Tuple[Tuple[int, int], ...]]
    sequence: str

    @property
    def key(self) -> Tuple[str, ...]:
        return tuple(sorted(self.points))

    @property
    def is_du_val(self) -> bool:
        return all(_is_du_val_text(p) for p in self.points)

    def chain_notation(self, reverse: bool = False) -> Optional[str]:
        if self.components is None:
            return None
        components = self.components[::-1] if reverse else self.components
        return " + ".join(
            "{}({})".format(m if m != 1 else "", s) for s, m in components
        )

    def to_dict(self):
        return {
            "points": list(self.key),
            "multiplicity": self.multiplicity,
            "lt": self.lt,
            "coefficient": self.coefficient,
            "fibre": self.chain_notation(),
        }


Token = Tuple[int, bool]


def _token_text(token: Token) -> str:
    return "{}{}".format(token[0], "'" if token[1] else "")


def _chain_text(tokens: Sequence[Token]) -> str:
    tokens = max(tuple(tokens), tuple(tokens)[::-1])
    return ",".join(_token_text(t) for t in tokens)


def _star_text(center: Token, branches: Sequence[Sequence[Token]]) -> str:
    ordered = sorted(tuple(b) for b in branches)
    return "star({}; {})".format(
        _token_text(center), " | ".join(",".join(_token_text(t) for t in b) for b in ordered)
    )


def _is_du_val_text(text: str) -> bool:
    return all(w == "2" for w in re.findall(r"\d+", text.replace("star(", "(")))


def _parse_tokens(text: str) -> List[Token]:
    tokens: List[Token] = []
    for raw in (t.strip() for t in text.split(",")):
        marked = raw.endswith("'")
        raw = raw.rstrip("'")
        match = re.match(r"^A_?(\d+)$", raw)
        if match:
            tokens.extend([(2, False)] * int(match.group(1)))
            continue
        try:
            tokens.append((int(raw), marked))
        except ValueError:
            raise InputError("bad fibre token {!r}".format(raw)) from None
    return tokens


def fibre_key(text: str) -> Tuple[str, ...]:
    """Canonical key of points written ``2,3',2; 2'`` or ``2'; star(2; 2 | 2 | 2,3')``."""
    parts, depth, current = [], 0, ""
    for char in text:
        depth += {"(": 1, ")": -1}.get(char, 0)
        if char == ";" and depth == 0:
            parts.append(current)
            current = ""
        else:
            current += char
    parts.append(current)
    points = []
    for part in (p.strip() for p in parts):
        match = re.match(r"^star\((.*);(.*)\)$", part)
        if match:
            (center,) = _parse_tokens(match.group(1))
            branches = [_parse_tokens(b) for b in match.group(2).split("|")]
            points.append(_star_text(center, branches))
        else:
            points.append(_chain_text(_parse_tokens(part.strip("()"))))
    return tuple(sorted(points))


def _start_fibre() -> Tuple[nx.Graph, int]:
    """``(-2) + 2(-1) + (-2)``: both forced blow-ups of a smooth fibre done."""
    fibre = nx.Graph()
    fibre.add_node(0, self_int=-2, mult=1)
    fibre.add_node(1, self_int=-1, mult=2)
    fibre.add_node(2, self_int=-2, mult=1)
    fibre.add_edges_from([(0, 1), (1, 2)])
    return fibre, 1


def _blow_up_fibre(fibre: nx.Graph, minus_one: int, neighbour: Optional[int]):
    fibre = fibre.copy()
    new = max(fibre) + 1
    mult = fibre.nodes[minus_one]["mult"]
    fibre.nodes[minus_one]["self_int"] -= 1
    if neighbour is not None:
        mult += fibre.nodes[neighbour]["mult"]
        fibre.nodes[neighbour]["self_int"] -= 1
        fibre.remove_edge(minus_one, neighbour)
        fibre.add_edge(new, neighbour)
    fibre.add_node(new, self_int=-1, mult=mult)
    fibre.add_edge(minus_one, new)
    return fibre, new


def _walk(graph: nx.Graph, start: int) -> List[int]:
    return list(nx.dfs_preorder_nodes(graph, source=start))


def _fibre_point(
    sub: nx.Graph, marked: set
) -> Optional[Tuple[str, SingularityGraph, int]]:
    """Text, graph and marked vertex position of one point, None unless it is lt."""

    def weight(n):
        return -sub.nodes[n]["self_int"]

    degrees = dict(sub.degree())
    hubs = [n for n, d in degrees.items() if d >= 3]
    if not hubs:
        end = min(n for n, d in degrees.items() if d <= 1)
        order = _walk(sub, end)
        graph = ChainSingularity(tuple(weight(n) for n in order))
        tokens = [(weight(n), n in marked) for n in order]
        text = _chain_text(tokens)
    elif len(hubs) == 1 and degrees[hubs[0]] == 3:
        center = hubs[0]
        rest = sub.subgraph(n for n in sub if n != center)
        branches = [_walk(rest, n) for n in sorted(sub[center])]
        try:
            graph = StarSingularity(
                weight(center),
                tuple(ChainSingularity(tuple(weight(n) for n in b)) for b in branches),
            )
        except InputError:
            return None
        order = [center] + [n for b in branches for n in b]
        text = _star_text(
            (weight(center), center in marked),
            [[(weight(n), n in marked) for n in b] for b in branches],
        )
    else:
        return None
    position = next(i for i, n in enumerate(order) if n in marked)
    return text, graph, position


def _is_cyclic_du_val_or_almost(graph: SingularityGraph) -> bool:
    if not isinstance(graph, ChainSingularity):
        return False
    weights = max(graph.weights, graph.weights[::-1])
    return all(w == 2 for w in weights[1:]) and weights[0] in (2, 3)


def _fibres(max_blowups: int) -> Iterator[Tuple[nx.Graph, int, str]]:
    fibre, minus_one = _start_fibre()
    stack = [(fibre, minus_one, 2, "")]
    while stack:
        fibre, minus_one, depth, sequence = stack.pop()
        yield fibre, minus_one, sequence
        if depth >= max_blowups:
            continue
        options = [(None, "i")] + [(n, "e") for n in sorted(fibre[minus_one])]
        for neighbour, step in options:
            child, new = _blow_up_fibre(fibre, minus_one, neighbour)
            stack.append((child, new, depth + 1, sequence + step))


def _entry(fibre: nx.Graph, minus_one: int, sequence: str) -> Optional[Tuple[FibreEntry, list]]:
    rest = fibre.subgraph(n for n in fibre if n != minus_one)
    marked = set(fibre[minus_one])
    points = []
    for nodes in nx.connected_components(rest):
        point = _fibre_point(rest.subgraph(nodes), marked)
        if point is None:
            return None
        points.append(point)
    lt = all(
        classify_reduced_germ(graph, [{position: 1}]) in (Verdict.KLT, Verdict.PLT, Verdict.LT)
        for _, graph, position in points
    )
    coefficient = max(discrepancies(graph).coefficient for _, graph, _ in points)
    components = None
    if all(d <= 2 for _, d in fibre.degree()):
        end = min(n for n, d in fibre.degree() if d == 1)
        components = tuple(
            (fibre.nodes[n]["self_int"], fibre.nodes[n]["mult"]) for n in _walk(fibre, end)
        )
    entry = FibreEntry(
        points=tuple(text for text, _, _ in points),
        multiplicity=fibre.nodes[minus_one]["mult"],
        lt=lt,
        coefficient=coefficient,
        components=components,
        sequence=sequence,
    )
    return entry, [graph for _, graph, _ in points]


def enumerate_fibres(max_blowups: int = DEFAULT_FIBRE_DEPTH) -> List[FibreEntry]:
    """
    Every singular fibre with log terminal points reached by at most ``max_blowups`` blow-ups
    of a smooth fibre, each blow-up on the unique -1 curve. Isomorphic fibres appear once.
    """
    if max_blowups < 2:
        raise InputError("a singular fibre needs at least two blow-ups")
    seen = {}
    for fibre, minus_one, sequence in _fibres(max_blowups):
        found = _entry(fibre, minus_one, sequence)
        if found is None:
            continue
        entry, _ = found
        seen.setdefault((entry.key, entry.multiplicity), entry)
    return sorted(seen.values(), key=lambda e: (len(e.sequence), e.multiplicity, e.key))


def fibre_catalogue(
    max_blowups: int = DEFAULT_FIBRE_DEPTH,
    max_coefficient: Fraction = FIBRE_COEFFICIENT_BOUND,
    require_cyclic: bool = True,
) -> List[FibreEntry]:
    """
    Multiple fibres with ``e(T) < max_coefficient``. With ``require_cyclic`` the fibre must
    also contain a Du Val or almost Du Val chain.
    """
    start = time.monotonic()
    seen = {}
    for fibre, minus_one, sequence in _fibres(max_blowups):
        found = _entry(fibre, minus_one, sequence)
        if found is None:
            continue
        entry, graphs = found
        if entry.coefficient >= max_coefficient:
            continue
        if require_cyclic and not any(_is_cyclic_du_val_or_almost(g) for g in graphs):
            continue
        seen.setdefault((entry.key, entry.multiplicity), entry)
    entries = sorted(seen.values(), key=lambda e: (e.multiplicity, e.key))
    logger.debug(
        "FIBRE-CATALOGUE %d entries up to %d blow-ups (%.4f)s",
        len(entries),
        max_blowups,
        time.monotonic() - start,
    )
    return entries


@dataclass(frozen=True)
class LowGenusCurve:
    """Numerical class ``dE + rF`` on F_n, E the negative section."""

    n: int
    d: int
    r: int
    genus: int

    @property
    def self_int(self) -> int:
        return -self.n * self.d * self.d + 2 * self.d * self.r


def hirzebruch_low_genus_curves(n_max: int = 6, d_max: int = 12) -> List[LowGenusCurve]:
    """
    Classes of irreducible curves of degree ``d >= 2`` over the base and arithmetic genus at
    most one: ``r`` is fixed by adjunction and must satisfy ``D·E = r - nd >= 0``.
    """
    found = []
    for n in range(n_max + 1):
        for d in range(2, d_max + 1):
            for genus in (0, 1):
                numerator = 2 * genus - 2 + n * d * (d - 1) + 2 * d
                r, remainder = divmod(numerator, 2 * (d - 1))
                if remainder or r < n * d:
                    continue
                found.append(LowGenusCurve(n, d, r, genus))
    return found
