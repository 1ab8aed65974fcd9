"""
Line oriented blow-up programs::

    surface P2
    curve A degree 1
    curve B degree 2
    point d on B D contact B:D=2
    blowup d along D times 3 as Ed
    boundary A 1/2

``#`` starts a comment. See :func:`parse_program` for the full statement list.
"""

import logging
import re
import shlex
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Tuple

from tigerhunt.exact import as_rational
from tigerhunt.exceptions import (
    ContactExceedsIntersection,
    InputError,
    ParseError,
    TigerhuntError,
    UnknownCurve,
)
from tigerhunt.surface.configuration import Configuration, Curve
from tigerhunt.surface.model import Policy, SurfaceModel, contract_to_surface
from tigerhunt.surface.pairs import Boundary

logger = logging.getLogger(__name__)

_GERM = re.compile(r"^(?P<curve>[A-Za-z_][\w']*)(\((?P<kind>cusp)(:(?P<order>\d+))?\))?$")
_NAME = re.compile(r"^[A-Za-z_][\w'.]*$")


@dataclass(frozen=True)
class SurfaceDecl:
    line: int
    kind: str
    n: int = 0
    k_squared: Optional[int] = None
    rho: Optional[int] = None


@dataclass(frozen=True)
class CurveDecl:
    line: int
    name: str
    kind: str
    values: Tuple[int, ...]


@dataclass(frozen=True)
class IntersectDecl:
    line: int
    a: str
    b: str
    value: int


@dataclass(frozen=True)
class PointDecl:
    line: int
    name: str
    germs: Tuple[Tuple[str, Tuple[int, ...]], ...]
    contacts: Tuple[Tuple[int, int, int], ...] = ()


@dataclass(frozen=True)
class BlowupDecl:
    line: int
    center: Tuple[str, ...]
    along: Optional[str] = None
    times: int = 1
    name: Optional[str] = None

    def names(self, first_step: int) -> List[str]:
        if self.name is None:
            return ["E{}".format(first_step + i) for i in range(self.times)]
        if self.times == 1:
            return [self.name]
        return ["{}{}".format(self.name, i + 1) for i in range(self.times)]


@dataclass(frozen=True)
class GermDecl:
    line: int
    name: str
    incidences: Tuple[Tuple[str, int], ...]


@dataclass(frozen=True)
class BuiltProgram:
    config: Configuration
    policy: Policy
    boundary: Boundary
    analysis_germs: Dict[str, Dict[str, int]]

    def model(self) -> SurfaceModel:
        return contract_to_surface(self.config, self.policy)


@dataclass(frozen=True)
class BlowupProgram:
    """Validated program. :meth:`build` executes it."""

    text: str
    surface: SurfaceDecl
    statements: Tuple = ()
    contract: FrozenSet[str] = field(default_factory=frozenset)
    keep: FrozenSet[str] = field(default_factory=frozenset)
    boundary: Tuple[Tuple[str, Fraction], ...] = ()

    @property
    def policy(self) -> Policy:
        if self.contract:
            return Policy(explicit=self.contract - self.keep)
        return Policy(keep=self.keep)

    def build(self) -> BuiltProgram:
        start = time.monotonic()
        cfg = _start(self.surface)
        degrees: Dict[str, Tuple[str, Tuple[int, ...]]] = {}
        germs: Dict[str, Dict[str, int]] = {}
        for statement in self.statements:
            try:
                if isinstance(statement, (CurveDecl, IntersectDecl, PointDecl)):
                    cfg = _declare(cfg, self.surface, statement, degrees)
                elif isinstance(statement, BlowupDecl):
                    cfg = _run_blowup(cfg, statement)
                elif isinstance(statement, GermDecl):
                    incidences: Dict[str, int] = {}
                    for curve, n in statement.incidences:
                        cfg.curve(curve)
                        incidences[curve] = incidences.get(curve, 0) + n
                    germs[statement.name] = incidences
            except UnknownCurve as e:
                raise UnknownCurve(e.curve, statement.line) from None
            except (ContactExceedsIntersection, ParseError):
                raise
            except InputError as e:
                raise ParseError(str(e), statement.line) from None
        for name, _ in self.boundary:
            cfg.curve(name)
        boundary = Boundary(dict(self.boundary))
        logger.debug("BUILD %d statements (%.4f)s", len(self.statements), time.monotonic() - start)
        return BuiltProgram(cfg, self.policy, boundary, germs)


def _start(decl: SurfaceDecl) -> Configuration:
    if decl.kind == "P2":
        return Configuration.plane()
    if decl.kind == "F":
        return Configuration.hirzebruch(decl.n)
    return Configuration.abstract(
        0 if decl.k_squared is None else decl.k_squared, 1 if decl.rho is None else decl.rho
    )


def _pairing(surface: SurfaceDecl, x: Tuple[int, ...], y: Tuple[int, ...]) -> int:
    if surface.kind == "P2":
        return x[0] * y[0]
    (a, b), (c, d) = x, y
    return -surface.n * a * c + a * d + b * c


def _add_curve(cfg, surface, decl: CurveDecl, degrees) -> Configuration:
    if decl.kind == "self":
        s, k = decl.values
        return cfg.with_curve(Curve(decl.name, s, k))
    if decl.kind == "degree":
        (d,) = decl.values
        curve = Curve(decl.name, d * d, -3 * d)
    else:
        a, b = decl.values
        n = surface.n
        curve = Curve(decl.name, -n * a * a + 2 * a * b, a * (n - 2) - 2 * b)
    cfg = cfg.with_curve(curve)
    for other, (_, values) in degrees.items():
        value = _pairing(surface, decl.values, values)
        if value < 0:
            raise InputError("{} and {} would meet negatively".format(decl.name, other))
        if value:
            cfg = cfg.with_intersection(decl.name, other, value)
    degrees[decl.name] = (decl.kind, decl.values)
    return cfg


def _declare(cfg: Configuration, surface: SurfaceDecl, statement, degrees) -> Configuration:
    if isinstance(statement, CurveDecl):
        return _add_curve(cfg, surface, statement, degrees)
    if isinstance(statement, IntersectDecl):
        return cfg.with_intersection(statement.a, statement.b, statement.value)
    cfg = cfg.with_point(
        statement.name, statement.germs, {(i, j): v for i, j, v in statement.contacts}
    )
    _check_contacts(cfg, statement)
    return cfg


def _check_contacts(cfg: Configuration, decl: PointDecl):
    curves = {c for c, _ in decl.germs}
    for a, b in combinations(sorted(curves), 2):
        used = cfg.tracked_contact(a, b)
        if used > cfg.intersection(a, b):
            raise ContactExceedsIntersection(
                "line {}: contact {} between {} and {} exceeds their intersection {}".format(
                    decl.line, used, a, b, cfg.intersection(a, b)
                )
            )


def _center(cfg: Configuration, center: Tuple[str, ...]) -> Tuple[Configuration, str]:
    if center[0] == "meet":
        return cfg, cfg.point_meeting(*center[1:])
    if center[0] == "free":
        return cfg.with_free_point(center[1])
    return cfg, center[0]


def _run_blowup(cfg: Configuration, decl: BlowupDecl) -> Configuration:
    if decl.along is not None:
        cfg.curve(decl.along)
    names = decl.names(len(cfg.history) + 1)
    cfg, point = _center(cfg, decl.center)
    for i, name in enumerate(names):
        if i:
            point = cfg.point_meeting(names[i - 1], decl.along)
        cfg = cfg.blow_up(point, name)
    return cfg


def _int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError("expected an integer, got {!r}".format(token), line) from None


def _options(tokens: List[str], line: int, flags: Dict[str, int]) -> Dict[str, List[str]]:
    """Splits ``key value...`` tails; ``flags`` gives the arity of each key."""
    result: Dict[str, List[str]] = {}
    i = 0
    while i < len(tokens):
        key = tokens[i]
        if key not in flags:
            raise ParseError("unexpected {!r}".format(key), line)
        arity = flags[key]
        values = tokens[i + 1:i + 1 + arity]
        if len(values) != arity:
            raise ParseError("{} needs {} argument(s)".format(key, arity), line)
        result[key] = values
        i += 1 + arity
    return result


class _Parser:
    def __init__(self):
        self.surface: Optional[SurfaceDecl] = None
        self.statements: List = []
        self.curves: set = set()
        self.points: set = set()
        self.contract: set = set()
        self.keep: set = set()
        self.boundary: Dict[str, Fraction] = {}
        self.steps = 0

    def known(self, name: str, line: int):
        if name not in self.curves:
            raise UnknownCurve(name, line)

    def fresh(self, name: str, line: int):
        if not _NAME.match(name):
            raise ParseError("bad name {!r}".format(name), line)
        if name in self.curves:
            raise ParseError("curve {} declared twice".format(name), line)
        self.curves.add(name)

    def surface_stmt(self, args, line):
        if self.surface is not None or self.statements:
            raise ParseError("surface must be the first statement", line)
        if not args:
            raise ParseError("surface needs a kind", line)
        kind = args[0]
        if kind == "P2" and len(args) == 1:
            self.surface = SurfaceDecl(line, "P2")
        elif kind == "F" and len(args) == 2:
            self.surface = SurfaceDecl(line, "F", n=_int(args[1], line))
        elif kind == "abstract":
            opts = _options(args[1:], line, {"k2": 1, "rho": 1})
            self.surface = SurfaceDecl(
                line,
                "abstract",
                k_squared=_int(opts["k2"][0], line) if "k2" in opts else None,
                rho=_int(opts["rho"][0], line) if "rho" in opts else None,
            )
        else:
            raise ParseError("unknown surface {!r}".format(" ".join(args)), line)

    def curve_stmt(self, args, line):
        if len(args) < 3:
            raise ParseError("curve needs a name and a class", line)
        name, kind, values = args[0], args[1], args[2:]
        expected = {"P2": ("degree", 1), "F": ("class", 2), "abstract": ("self", 3)}
        want, arity = expected[self.surface.kind]
        if kind != want:
            raise ParseError("use 'curve X {} ...' on this surface".format(want), line)
        if kind == "self":
            if len(values) != 3 or values[1] != "kdeg":
                raise ParseError("expected 'curve X self s kdeg k'", line)
            values = [values[0], values[2]]
        elif len(values) != arity:
            raise ParseError("{} needs {} integer(s)".format(kind, arity), line)
        self.fresh(name, line)
        self.statements.append(CurveDecl(line, name, kind, tuple(_int(v, line) for v in values)))

    def intersect_stmt(self, args, line):
        if len(args) != 3:
            raise ParseError("expected 'intersect X Y n'", line)
        self.known(args[0], line)
        self.known(args[1], line)
        self.statements.append(IntersectDecl(line, args[0], args[1], _int(args[2], line)))

    def point_stmt(self, args, line):
        if len(args) < 3 or args[1] != "on":
            raise ParseError("expected 'point p on X Y ...'", line)
        name = args[0]
        if name in self.points:
            raise ParseError("point {} declared twice".format(name), line)
        body = args[2:]
        split = body.index("contact") if "contact" in body else len(body)
        germs = []
        for token in body[:split]:
            match = _GERM.match(token)
            if not match:
                raise ParseError("bad germ {!r}".format(token), line)
            self.known(match.group("curve"), line)
            mults: Tuple[int, ...] = ()
            if match.group("kind"):
                mults = (2,) * int(match.group("order") or 1)
            germs.append((match.group("curve"), mults))
        if not germs:
            raise ParseError("a point needs at least one germ", line)
        contacts = []
        for token in body[split + 1:]:
            match = re.match(r"^([\w']+):([\w']+)=(\d+)$", token)
            if not match:
                raise ParseError("bad contact {!r}".format(token), line)
            a, b, value = match.group(1), match.group(2), int(match.group(3))
            positions = [i for i, (c, _) in enumerate(germs) if c == a]
            if a == b:
                positions = positions[:2]
                if len(positions) != 2:
                    raise ParseError("{} has one germ at {}".format(a, name), line)
                i, j = positions
            else:
                others = [i for i, (c, _) in enumerate(germs) if c == b]
                if not positions or not others:
                    raise ParseError("contact names a curve not at {}".format(name), line)
                i, j = positions[0], others[0]
            contacts.append((i, j, value))
        self.points.add(name)
        self.statements.append(PointDecl(line, name, tuple(germs), tuple(contacts)))

    def blowup_stmt(self, args, line):
        if not args:
            raise ParseError("blowup needs a center", line)
        if args[0] == "meet":
            if len(args) < 3:
                raise ParseError("expected 'blowup meet X Y'", line)
            self.known(args[1], line)
            self.known(args[2], line)
            center, rest = ("meet", args[1], args[2]), args[3:]
        elif args[0] == "free":
            if len(args) < 3 or args[1] != "on":
                raise ParseError("expected 'blowup free on E'", line)
            self.known(args[2], line)
            center, rest = ("free", args[2]), args[3:]
        else:
            if args[0] not in self.points:
                raise ParseError("unknown point {!r}".format(args[0]), line)
            center, rest = (args[0],), args[1:]
        opts = _options(rest, line, {"along": 1, "times": 1, "as": 1})
        along = opts.get("along", [None])[0]
        if along is not None:
            self.known(along, line)
        times = _int(opts["times"][0], line) if "times" in opts else 1
        if times < 1:
            raise ParseError("times must be positive", line)
        if times > 1 and along is None:
            raise ParseError("repeated blow-ups need 'along'", line)
        decl = BlowupDecl(line, center, along, times, opts.get("as", [None])[0])
        for name in decl.names(self.steps + 1):
            self.fresh(name, line)
        self.steps += times
        self.statements.append(decl)

    def germ_stmt(self, args, line):
        if len(args) < 3 or args[1] != "meets":
            raise ParseError("expected 'germ G meets E1 E2 ...'", line)
        incidences = []
        for token in args[2:]:
            curve, _, times = token.partition("*")
            self.known(curve, line)
            incidences.append((curve, _int(times, line) if times else 1))
        self.statements.append(GermDecl(line, args[0], tuple(incidences)))

    def contract_stmt(self, args, line, target):
        if not args:
            raise ParseError("expected at least one curve", line)
        for name in args:
            self.known(name, line)
        target.update(args)

    def boundary_stmt(self, args, line):
        if not args or len(args) % 2:
            raise ParseError("expected 'boundary X coef [Y coef ...]'", line)
        for name, value in zip(args[::2], args[1::2]):
            self.known(name, line)
            try:
                self.boundary[name] = as_rational(value)
            except (TypeError, ValueError):
                raise ParseError("bad coefficient {!r}".format(value), line) from None


def parse_program(text: str) -> BlowupProgram:
    """
    Statements, one per line:

    - ``surface P2 | F n | abstract [k2 K] [rho R]`` (first; P2 when omitted)
    - ``curve X degree d`` on P2, ``curve X class a b`` on F_n (a·σ + b·f, σ² = -n),
      ``curve X self s kdeg k`` on abstract surfaces
    - ``intersect X Y n``
    - ``point p on X Y X(cusp) Z(cusp:g) [contact X:Y=n ...]``; repeating a curve declares
      a node, ``contact X:X=n`` makes it a tacnode
    - ``blowup <p | meet X Y | free on E> [along X] [times n] [as Name]``
    - ``germ G meets E1 E2*2 ...``
    - ``contract X ...``, ``keep X ...``
    - ``boundary X coef [Y coef ...]``

    :raises: :class:`tigerhunt.exceptions.ParseError`,
        :class:`tigerhunt.exceptions.UnknownCurve`,
        :class:`tigerhunt.exceptions.ContactExceedsIntersection`
    """
    parser = _Parser()
    handlers = {
        "surface": parser.surface_stmt,
        "curve": parser.curve_stmt,
        "intersect": parser.intersect_stmt,
        "point": parser.point_stmt,
        "blowup": parser.blowup_stmt,
        "germ": parser.germ_stmt,
        "boundary": parser.boundary_stmt,
    }
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            tokens = shlex.split(body)
        except ValueError as e:
            raise ParseError(str(e), number) from None
        keyword, args = tokens[0], tokens[1:]
        if parser.surface is None and keyword != "surface":
            parser.surface = SurfaceDecl(0, "P2")
        if keyword == "contract":
            parser.contract_stmt(args, number, parser.contract)
        elif keyword == "keep":
            parser.contract_stmt(args, number, parser.keep)
        elif keyword in handlers:
            handlers[keyword](args, number)
        else:
            raise ParseError("unknown statement {!r}".format(keyword), number)
    if parser.surface is None:
        parser.surface = SurfaceDecl(0, "P2")
    program = BlowupProgram(
        text=text,
        surface=parser.surface,
        statements=tuple(parser.statements),
        contract=frozenset(parser.contract),
        keep=frozenset(parser.keep),
        boundary=tuple(parser.boundary.items()),
    )
    _dry_contacts(program)
    return program


def _dry_contacts(program: BlowupProgram):
    """Checks declared contacts against the declared intersections, up to the first blow-up."""
    cfg = _start(program.surface)
    degrees: Dict = {}
    for statement in program.statements:
        if isinstance(statement, BlowupDecl):
            return
        try:
            cfg = _declare(cfg, program.surface, statement, degrees)
        except (ContactExceedsIntersection, ParseError, UnknownCurve):
            raise
        except TigerhuntError as e:
            raise ParseError(str(e), statement.line) from None


def build(text: str) -> BuiltProgram:
    return parse_program(text).build()
