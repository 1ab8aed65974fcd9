"""
Dual graphs of log terminal surface singularities: chains (cyclic quotients) and stars.
Indices, discrepancies, spectral values, the combinatorial lt/lc test for reduced germs,
and the classification enumerators.
"""

import enum
import logging
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from tigerhunt.exact import RatMatrix, RationalLike, as_rational, det, solve
from tigerhunt.exceptions import GuardExceeded, InputError, NonIntegral

logger = logging.getLogger(__name__)

DEFAULT_MAX_INDEX = 200
SMALL_INDEX_GUARD = 30

_A_TOKEN = re.compile(r"^A_?\{?(\d+)\}?$")


class Verdict(str, enum.Enum):
    KLT = "klt"
    PLT = "plt"
    LT = "lt"
    LC = "lc"
    NOT_LC = "not-lc"


def _parse_weights(text: str) -> Tuple[int, ...]:
    weights: List[int] = []
    for token in (t.strip() for t in text.split(",")):
        if not token:
            raise InputError("empty weight in {!r}".format(text))
        match = _A_TOKEN.match(token)
        if match:
            weights.extend([2] * int(match.group(1)))
            continue
        try:
            weights.append(int(token))
        except ValueError:
            raise InputError("bad weight {!r}".format(token)) from None
    return tuple(weights)


@dataclass(frozen=True)
class ChainSingularity:
    """
    Weighted chain ``(w1, ..., wn)``, with ``wi = -Ei^2`` read left to right. ``marked``
    records which ends are met by a curve germ; the marked end plays the role of E1.
    """

    weights: Tuple[int, ...]
    marked: Tuple[bool, bool] = (False, False)

    def __post_init__(self):
        weights = tuple(int(w) for w in self.weights)
        if not weights:
            raise InputError("a chain needs at least one curve")
        if any(w < 2 for w in weights):
            raise InputError("chain weights must be >= 2, got {}".format(weights))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "marked", (bool(self.marked[0]), bool(self.marked[1])))

    @classmethod
    def parse(cls, text: str) -> "ChainSingularity":
        """Reads ``2,5,2,2,2,2@L``; ``A5`` tokens expand to five 2s."""
        body, _, mark = text.strip().strip("()").partition("@")
        mark = mark.upper()
        if mark not in ("", "L", "R", "LR", "RL"):
            raise InputError("bad end marker {!r}".format(mark))
        return cls(_parse_weights(body), ("L" in mark, "R" in mark))

    @property
    def length(self) -> int:
        return len(self.weights)

    @property
    def index(self) -> int:
        return chain_index(self)

    @property
    def is_du_val(self) -> bool:
        return all(w == 2 for w in self.weights)

    def reversed(self) -> "ChainSingularity":
        return ChainSingularity(self.weights[::-1], (self.marked[1], self.marked[0]))

    def canonical(self) -> "ChainSingularity":
        """Marked end on the left."""
        if self.marked == (False, True):
            return self.reversed()
        return self

    def unmarked(self) -> "ChainSingularity":
        return ChainSingularity(self.weights)

    def matrix(self) -> RatMatrix:
        return chain_matrix(self.weights)

    def __str__(self):
        mark = ("L" if self.marked[0] else "") + ("R" if self.marked[1] else "")
        body = ",".join(str(w) for w in self.weights)
        return "{}@{}".format(body, mark) if mark else body


@dataclass(frozen=True)
class StarSingularity:
    """Central curve of weight ``center`` with three branch chains, each read outward."""

    center: int
    branches: Tuple[ChainSingularity, ChainSingularity, ChainSingularity]

    def __post_init__(self):
        if self.center < 2:
            raise InputError("central weight must be >= 2")
        if len(self.branches) != 3:
            raise InputError("a star has exactly three branches")
        branches = tuple(ChainSingularity(b.weights, (True, False)) for b in self.branches)
        object.__setattr__(self, "branches", branches)
        if sum(Fraction(1, b.index) for b in branches) <= 1:
            raise InputError(
                "branch indices {} do not give a log terminal star".format(
                    [b.index for b in branches]
                )
            )

    @classmethod
    def parse(cls, text: str) -> "StarSingularity":
        match = re.match(r"^\s*star\(\s*(\d+)\s*;(.*)\)\s*$", text)
        if not match:
            raise InputError("bad star {!r}".format(text))
        parts = match.group(2).split("|")
        if len(parts) != 3:
            raise InputError("a star has exactly three branches")
        return cls(int(match.group(1)), tuple(ChainSingularity(_parse_weights(p)) for p in parts))

    def vertices(self) -> Tuple[List[int], List[Tuple[int, int]]]:
        """Weights with the center at position 0, and the edge list."""
        weights = [self.center]
        edges = []
        for branch in self.branches:
            previous = 0
            for w in branch.weights:
                weights.append(w)
                edges.append((previous, len(weights) - 1))
                previous = len(weights) - 1
        return weights, edges

    @property
    def is_du_val(self) -> bool:
        return self.center == 2 and all(b.is_du_val for b in self.branches)

    def __str__(self):
        return "star({}; {})".format(
            self.center, " | ".join(",".join(str(w) for w in b.weights) for b in self.branches)
        )


class Smooth:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    is_du_val = True

    def __str__(self):
        return "smooth"

    def __repr__(self):
        return "Smooth()"


SMOOTH = Smooth()

SingularityGraph = Union[ChainSingularity, StarSingularity, Smooth]


@dataclass(frozen=True)
class DiscrepancyData:
    e: Tuple[Fraction, ...]
    coefficient: Fraction
    index: Optional[int]
    det_abs: int


def parse_graph(text: str) -> SingularityGraph:
    text = text.strip()
    if text == "smooth":
        return SMOOTH
    if text.startswith("star"):
        return StarSingularity.parse(text)
    return ChainSingularity.parse(text)


def chain_matrix(weights: Sequence[int]) -> RatMatrix:
    n = len(weights)
    return RatMatrix(
        tuple(
            tuple(-weights[i] if i == j else (1 if abs(i - j) == 1 else 0) for j in range(n))
            for i in range(n)
        )
    )


def graph_matrix(weights: Sequence[int], edges: Sequence[Tuple[int, int]]) -> RatMatrix:
    n = len(weights)
    rows = [[0] * n for _ in range(n)]
    for i, w in enumerate(weights):
        rows[i][i] = -w
    for i, j in edges:
        rows[i][j] += 1
        rows[j][i] += 1
    return RatMatrix.from_rows(rows)


def _continuants(weights: Sequence[int]) -> Tuple[List[int], List[int]]:
    """
    ``theta[k]`` is the determinant of the leading k×k block of ``-M`` and ``phi[k]`` that of
    the trailing block starting at curve k (1-based); ``theta[0] = phi[n+1] = 1``.
    """
    n = len(weights)
    theta = [1] * (n + 1)
    for k in range(1, n + 1):
        theta[k] = weights[k - 1] * theta[k - 1] - (theta[k - 2] if k >= 2 else 0)
    phi = [1] * (n + 2)
    for k in range(n, 0, -1):
        phi[k] = weights[k - 1] * phi[k + 1] - (phi[k + 2] if k + 2 <= n + 1 else 0)
    return theta, phi


def chain_inverse_solve(weights: Sequence[int], rhs: Mapping[int, RationalLike]) -> Tuple:
    """
    Returns ``(-M)^-1 · v`` for a chain, where ``v`` is given sparsely as position → value
    (0-based). Used for discrepancies (``v = w - 2``) and pullbacks (``v = C·E``).
    """
    theta, phi = _continuants(weights)
    r = theta[-1]
    n = len(weights)
    result = []
    for i in range(1, n + 1):
        total = 0
        for j0, value in rhs.items():
            j = j0 + 1
            a, b = min(i, j), max(i, j)
            total += Fraction(theta[a - 1] * phi[b + 1], r) * value
        result.append(total if isinstance(total, Fraction) else Fraction(total))
    return tuple(result)


def chain_index(chain: ChainSingularity) -> int:
    previous, current = 1, chain.weights[0]
    for w in chain.weights[1:]:
        previous, current = current, w * current - previous
    return current


def graph_discrepancies(weights: Sequence[int], edges: Sequence[Tuple[int, int]]) -> Tuple:
    """Full linear solve of ``M e = 2 - w``; the oracle for the closed forms below."""
    return solve(graph_matrix(weights, edges), [2 - w for w in weights])


def _chain_discrepancy_vector(weights: Sequence[int], germ: RationalLike = 0) -> Tuple:
    rhs: Dict[int, Fraction] = {i: Fraction(w - 2) for i, w in enumerate(weights) if w != 2}
    germ = as_rational(germ)
    if germ:
        rhs[0] = rhs.get(0, Fraction(0)) + germ
    if not rhs:
        return tuple(Fraction(0) for _ in weights)
    return chain_inverse_solve(weights, rhs)


def _star_discrepancy_vector(star: StarSingularity) -> Tuple:
    l = star.center
    numerator = Fraction(l - 2)
    denominator = Fraction(l)
    for branch in star.branches:
        r = branch.index
        k = spectral_value(branch)
        numerator += Fraction(k, r)
        denominator -= Fraction(r - 1 - k, r)
    center = numerator / denominator
    e = [center]
    for branch in star.branches:
        e.extend(_chain_discrepancy_vector(branch.weights, germ=center))
    return tuple(e)


def star_det_abs(star: StarSingularity) -> int:
    value = Fraction(star.center)
    product = 1
    for branch in star.branches:
        r = branch.index
        inner = chain_index(ChainSingularity(branch.weights[1:])) if branch.length > 1 else 1
        value -= Fraction(inner, r)
        product *= r
    return abs(int(value * product))


def discrepancies(graph: SingularityGraph) -> DiscrepancyData:
    if isinstance(graph, ChainSingularity):
        e = _chain_discrepancy_vector(graph.weights)
        r = chain_index(graph)
        return DiscrepancyData(e=e, coefficient=max(e), index=r, det_abs=r)
    if isinstance(graph, StarSingularity):
        e = _star_discrepancy_vector(graph)
        return DiscrepancyData(e=e, coefficient=max(e), index=None, det_abs=star_det_abs(graph))
    raise InputError("a smooth point has no exceptional curves")


def spectral_value(chain: ChainSingularity) -> int:
    chain = chain.canonical()
    if not chain.marked[0]:
        raise InputError("spectral value needs a marked end")
    r = chain_index(chain)
    k = _chain_discrepancy_vector(chain.weights)[0] * r
    if k.denominator != 1:
        raise NonIntegral("e(E1)·r = {} for {}".format(k, chain))
    return int(k)


def suspend(chain: ChainSingularity) -> ChainSingularity:
    chain = chain.canonical()
    if not chain.marked[0]:
        raise InputError("suspension needs a chain marked on the left")
    return ChainSingularity((2,) + chain.weights, (True, False))


def boundary_coefficient_chain(chain: ChainSingularity, lam: RationalLike) -> Fraction:
    """``e(E1, K + λD)`` for a germ D meeting the marked end normally."""
    lam = as_rational(lam)
    r = chain_index(chain)
    k = spectral_value(chain)
    return lam * Fraction(r - 1, r) + (1 - lam) * Fraction(k, r)


def germ_coefficients(
    weights: Sequence[int],
    edges: Sequence[Tuple[int, int]],
    germs: Mapping[int, RationalLike],
) -> Tuple:
    """
    Log pullback coefficients of ``K + Σ λ·D`` where ``germs`` maps a vertex to the total
    coefficient of the germs meeting it normally.
    """
    rhs = [Fraction(2 - w) for w in weights]
    for vertex, coefficient in germs.items():
        rhs[vertex] -= as_rational(coefficient)
    return solve(graph_matrix(weights, edges), rhs)


def star_coefficient(star: StarSingularity) -> Fraction:
    e = _star_discrepancy_vector(star)
    center = e[0]
    if center < max(e):
        raise NonIntegral("central curve of {} is not maximal".format(star))
    if (1 - center).numerator != 1:
        raise NonIntegral("central coefficient {} of {} is not k/(k+1)".format(center, star))
    return center


def star_log_discrepancy(star: StarSingularity) -> Fraction:
    """
    ``1/(r·l - r - s)`` for stars with two (2) branches; r is the index of the third branch
    and s the index of that branch without its curve next to the center.
    """
    short = [b for b in star.branches if b.weights == (2,)]
    if len(short) < 2:
        raise InputError("closed form needs two (2) branches, got {}".format(star))
    third = list(star.branches)
    third.remove(short[0])
    third.remove(short[1])
    beta = third[0]
    r = beta.index
    s = chain_index(ChainSingularity(beta.weights[1:])) if beta.length > 1 else 1
    return Fraction(1, r * star.center - r - s)


def different_coefficients(indices: Sequence[int]) -> List[Fraction]:
    if any(r < 1 for r in indices):
        raise InputError("indices must be positive")
    return [Fraction(r - 1, r) for r in indices]


def classify_reduced_germ(graph: SingularityGraph, germs: Sequence[Mapping[int, int]]) -> Verdict:
    """
    lt/lc verdict for ``K + C`` at a point, C reduced with the given smooth branches; each
    branch maps graph vertices (positions as in :func:`discrepancies`) to intersection
    numbers on the resolution.
    """
    germs = [dict((v, m) for v, m in g.items() if m) for g in germs]
    germs = [g for g in germs if g]
    if isinstance(graph, Smooth):
        # branches through a smooth point are assumed to cross normally
        verdicts = (Verdict.KLT, Verdict.PLT, Verdict.LT)
        return verdicts[len(germs)] if len(germs) < 3 else Verdict.NOT_LC
    if not germs:
        return Verdict.KLT
    if any(len(g) != 1 or next(iter(g.values())) != 1 for g in germs):
        return Verdict.NOT_LC
    touched = [next(iter(g)) for g in germs]
    if isinstance(graph, ChainSingularity):
        ends = {0, graph.length - 1}
        if len(touched) == 1:
            if touched[0] in ends:
                return Verdict.PLT
            w = graph.weights
            if graph.length == 3 and touched[0] == 1 and w[0] == w[2] == 2:
                return Verdict.LC
            return Verdict.NOT_LC
        if len(touched) == 2 and set(touched) <= ends:
            if graph.length == 1 or touched[0] != touched[1]:
                return Verdict.LC
        return Verdict.NOT_LC
    if len(touched) != 1:
        return Verdict.NOT_LC
    offset = 1
    ends = []
    for branch in graph.branches:
        ends.append((branch, offset + branch.length - 1))
        offset += branch.length
    for branch, far_end in ends:
        others = [b for b, _ in ends if b is not branch]
        if touched[0] == far_end and all(b.weights == (2,) for b in others):
            return Verdict.LC
    return Verdict.NOT_LC


def hj_chain(r: int, q: int) -> ChainSingularity:
    """Chain of the cyclic quotient of type ``1/r(1, q)``: continued fraction of r/q."""
    if not (0 < q < r) or math.gcd(r, q) != 1:
        raise InputError("need 0 < q < r with gcd 1, got r={} q={}".format(r, q))
    weights = []
    while q:
        w = -(-r // q)
        weights.append(w)
        r, q = q, w * q - r
    return ChainSingularity(tuple(weights))


def canonical_orientation(weights: Sequence[int]) -> Tuple[int, ...]:
    weights = tuple(weights)
    return max(weights, weights[::-1])


def _chains_up_to(max_index: int):
    seen = set()
    for r in range(2, max_index + 1):
        for q in range(1, r):
            if math.gcd(r, q) != 1:
                continue
            weights = canonical_orientation(hj_chain(r, q).weights)
            if weights not in seen:
                seen.add(weights)
                yield ChainSingularity(weights)


def enumerate_small_index(n: int, guard: int = SMALL_INDEX_GUARD) -> List[ChainSingularity]:
    if n > guard:
        raise GuardExceeded("enumerate_small_index is limited to n <= {}".format(guard))
    return [c for c in _chains_up_to(n) if not c.is_du_val]


def _oriented_chains_up_to(max_index: int):
    for r in range(2, max_index + 1):
        for q in range(1, r):
            if math.gcd(r, q) == 1:
                yield hj_chain(r, q)


def _runs(weights: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    skeleton, runs, current = [], [], 0
    for w in weights:
        if w == 2:
            current += 1
        else:
            skeleton.append(w)
            runs.append(current)
            current = 0
    runs.append(current)
    return tuple(skeleton), tuple(runs)


def _from_runs(skeleton: Sequence[int], runs: Sequence[int]) -> Tuple[int, ...]:
    weights: List[int] = []
    for w, run in zip(skeleton, runs):
        weights.extend([2] * run)
        weights.append(w)
    weights.extend([2] * runs[-1])
    return tuple(weights)


def _coefficient_class(e: Fraction) -> int:
    half = Fraction(1, 2)
    return (e > half) - (e < half)


@dataclass(frozen=True)
class FamilyDescriptor:
    """
    A family of graphs obtained by varying one run of 2s (``A_j``) in a template. Sporadic
    graphs have no parameter and ``j_min == j_max == 0``.
    """

    template: str
    j_min: int
    j_max: Optional[int]
    coefficient: str
    members: Tuple[SingularityGraph, ...] = field(compare=False, default=())

    @property
    def is_sporadic(self) -> bool:
        return "A_j" not in self.template

    @property
    def is_unbounded(self) -> bool:
        return self.j_max is None

    def __str__(self):
        if self.is_sporadic:
            return "({}) e={}".format(self.template, self.coefficient)
        upper = "∞" if self.j_max is None else str(self.j_max)
        return "({}) {}<=j<={} e={}".format(self.template, self.j_min, upper, self.coefficient)


def _linear(points: Sequence[Tuple[int, Fraction]]) -> Optional[Tuple[Fraction, Fraction]]:
    (j0, v0), (j1, v1) = points[0], points[1]
    slope = (v1 - v0) / (j1 - j0)
    intercept = v0 - slope * j0
    if all(slope * j + intercept == v for j, v in points):
        return slope, intercept
    return None


def _format_linear(slope: Fraction, intercept: Fraction) -> str:
    parts = []
    if slope:
        parts.append("j" if slope == 1 else "{}j".format(slope))
    if intercept or not parts:
        sign = "+" if intercept > 0 and parts else ""
        parts.append("{}{}".format(sign, intercept))
    return "".join(parts)


def _closed_form(members: Sequence[Tuple[int, Fraction, int]]) -> str:
    values = {e for _, e, _ in members}
    if len(values) == 1:
        return str(values.pop())
    if len(members) < 3:
        return ""
    numerators = _linear([(j, e * d) for j, e, d in members])
    denominators = _linear([(j, Fraction(d)) for j, _, d in members])
    if numerators is None or denominators is None:
        return ""
    return "({})/({})".format(_format_linear(*numerators), _format_linear(*denominators))


@dataclass
class _Candidate:
    graph: SingularityGraph
    coefficient: Fraction
    det_abs: int
    keys: List[Tuple] = field(default_factory=list)


def _chain_keys(weights):
    skeleton, runs = _runs(weights)
    keys = []
    for i in range(len(runs)):
        fixed = runs[:i] + (None,) + runs[i + 1:]
        keys.append((("chain", skeleton, fixed), runs[i]))
    return keys


def _star_keys(star: StarSingularity):
    keys = []
    for b, branch in enumerate(star.branches):
        others = tuple(sorted(x.weights for k, x in enumerate(star.branches) if k != b))
        skeleton, runs = _runs(branch.weights)
        for i in range(len(runs)):
            fixed = runs[:i] + (None,) + runs[i + 1:]
            keys.append((("star", star.center, others, skeleton, fixed), runs[i]))
    return keys


def _template(key) -> str:
    def render(skeleton, fixed):
        tokens = []
        for w, run in zip(skeleton, fixed):
            tokens.extend(["A_j"] if run is None else ["2"] * run)
            tokens.append(str(w))
        last = fixed[-1]
        tokens.extend(["A_j"] if last is None else ["2"] * last)
        return ",".join(tokens)

    if key[0] == "chain":
        return render(key[1], key[2])
    _, center, others, skeleton, fixed = key
    branches = [",".join(str(w) for w in o) for o in others] + [render(skeleton, fixed)]
    return "star({}; {})".format(center, " | ".join(branches))


def _member_of(key, j: int) -> SingularityGraph:
    if key[0] == "chain":
        _, skeleton, fixed = key
        runs = tuple(j if r is None else r for r in fixed)
        return ChainSingularity(canonical_orientation(_from_runs(skeleton, runs)))
    _, center, others, skeleton, fixed = key
    runs = tuple(j if r is None else r for r in fixed)
    branches = tuple(ChainSingularity(o) for o in others) + (
        ChainSingularity(_from_runs(skeleton, runs)),
    )
    return StarSingularity(center, branches)


def _graph_key(graph: SingularityGraph) -> Tuple:
    if isinstance(graph, StarSingularity):
        return ("star", graph.center, tuple(sorted(b.weights for b in graph.branches)))
    return ("chain", canonical_orientation(graph.weights))


def _tail_limit(shape, start: int) -> Optional[Fraction]:
    """
    The limit of the coefficient along a family from ``start`` on. Both the determinant and
    ``e·det`` are linear in the length of a run of 2s, so three members fix the tail; None
    when they are not, or when the coefficient grows without bound.
    """
    tail = []
    for j in range(start, start + 3):
        data = discrepancies(_member_of(shape, j))
        tail.append((j, data.coefficient, data.det_abs))
    numerators = _linear([(j, e * d) for j, e, d in tail])
    denominators = _linear([(j, Fraction(d)) for j, _, d in tail])
    if numerators is None or denominators is None:
        return None
    if denominators[0]:
        return numerators[0] / denominators[0]
    return None if numerators[0] else tail[0][1]


def _continues(shape, cls: int, start: int, bound: Fraction) -> bool:
    # coefficients along a tail are monotone, so the first member and the limit decide
    first = discrepancies(_member_of(shape, start)).coefficient
    if first >= bound or _coefficient_class(first) != cls:
        return False
    limit = _tail_limit(shape, start)
    if limit is None or limit > bound:
        return False
    return _coefficient_class(limit) == cls or limit == Fraction(1, 2)


def _star_candidates(bound: Fraction, max_index: int):
    pools = {r: [c for c in _oriented_chains_up_to(r) if c.index == r] for r in range(2, 6)}
    third_pool = list(_oriented_chains_up_to(max_index))
    center = 2
    while True:
        smallest = StarSingularity(center, tuple(ChainSingularity((2,)) for _ in range(3)))
        if discrepancies(smallest).coefficient >= bound:
            return
        shapes = [
            ((2, 2), third_pool),
            ((2, 3), pools[3]),
            ((2, 3), pools[4]),
            ((2, 3), pools[5]),
        ]
        seen = set()
        for (r1, r2), third in shapes:
            for b1 in pools[r1]:
                for b2 in pools[r2]:
                    for b3 in third:
                        star = StarSingularity(center, (b1, b2, b3))
                        key = (center, tuple(sorted(b.weights for b in star.branches)))
                        if key in seen:
                            continue
                        seen.add(key)
                        data = discrepancies(star)
                        if star.is_du_val or data.coefficient >= bound:
                            continue
                        if data.det_abs > max_index:
                            continue
                        yield star, data
        center += 1


def enumerate_small_coefficient(
    bound: RationalLike = Fraction(3, 5), max_index: int = DEFAULT_MAX_INDEX
) -> List[FamilyDescriptor]:
    """
    All non Du Val lt graphs with coefficient below ``bound``, grouped into families that vary
    one run of 2s. ``max_index`` caps the search only: a family is unbounded when its next
    member lies past the cap and the coefficient along its tail stays below ``bound``.
    """
    bound = as_rational(bound)
    if bound > Fraction(3, 5):
        raise InputError("bound must be at most 3/5")

    candidates: List[_Candidate] = []
    for chain in _chains_up_to(max_index):
        if chain.is_du_val:
            continue
        data = discrepancies(chain)
        if data.coefficient < bound:
            candidates.append(_Candidate(chain, data.coefficient, data.det_abs))
    for star, data in _star_candidates(bound, max_index):
        candidates.append(_Candidate(star, data.coefficient, data.det_abs))

    found = {_graph_key(c.graph) for c in candidates}
    groups: Dict[Tuple, Dict[int, _Candidate]] = defaultdict(dict)
    for candidate in candidates:
        if isinstance(candidate.graph, ChainSingularity):
            keys = _chain_keys(candidate.graph.weights)
        else:
            keys = _star_keys(candidate.graph)
        cls = _coefficient_class(candidate.coefficient)
        for key, j in keys:
            full = (cls,) + (key,)
            candidate.keys.append(full)
            groups[full][j] = candidate

    families: List[FamilyDescriptor] = []
    assigned = set()
    while True:
        live = {
            key: {j: c for j, c in members.items() if id(c) not in assigned}
            for key, members in groups.items()
        }
        live = {key: members for key, members in live.items() if len(members) >= 2}
        if not live:
            break
        key = max(live, key=lambda k: (len(live[k]), -min(live[k])))
        members = live[key]
        cls, shape = key
        j_min, j_max = min(members), max(members)
        unbounded = _graph_key(_member_of(shape, j_max + 1)) not in found and _continues(
            shape, cls, j_max + 1, bound
        )
        ordered = [members[j] for j in sorted(members)]
        families.append(
            FamilyDescriptor(
                template=_template(shape),
                j_min=j_min,
                j_max=None if unbounded else j_max,
                coefficient=_closed_form([(j, members[j].coefficient, members[j].det_abs)
                                          for j in sorted(members)]),
                members=tuple(c.graph for c in ordered),
            )
        )
        assigned.update(id(c) for c in ordered)

    for candidate in candidates:
        if id(candidate) in assigned:
            continue
        families.append(
            FamilyDescriptor(
                template=str(candidate.graph),
                j_min=0,
                j_max=0,
                coefficient=str(candidate.coefficient),
                members=(candidate.graph,),
            )
        )
    logger.debug("ENUMERATE small-coefficient %s %d families", bound, len(families))
    return families


@dataclass(frozen=True)
class TupleFamily:
    prefix: Tuple[int, int, int]
    low: int
    high: Optional[int]

    def __contains__(self, item) -> bool:
        item = tuple(item)
        if len(item) != 4 or item[:3] != self.prefix:
            return False
        return item[3] >= self.low and (self.high is None or item[3] <= self.high)

    def __str__(self):
        upper = "∞" if self.high is None else str(self.high)
        return "({},{},{},m) {}<=m<={}".format(*self.prefix, self.low, upper)


def bogomolov_tuples() -> List[TupleFamily]:
    """Sorted 4-tuples of integers >= 3 with ``Σ (r-1)/r <= 3``, i.e. ``Σ 1/r >= 1``."""
    families = []
    a = 3
    while Fraction(4, a) >= 1:
        b = a
        while Fraction(1, a) + Fraction(3, b) >= 1:
            c = b
            while Fraction(1, a) + Fraction(1, b) + Fraction(2, c) >= 1:
                head = Fraction(1, a) + Fraction(1, b) + Fraction(1, c)
                if head >= 1:
                    families.append(TupleFamily((a, b, c), c, None))
                else:
                    high = math.floor(1 / (1 - head))
                    if high >= c:
                        families.append(TupleFamily((a, b, c), c, high))
                c += 1
            b += 1
        a += 1
    return families
