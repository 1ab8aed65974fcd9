"""
Corpus case files. A case is a blow-up program with a header and expectation lines::

    case secant-tangent-family
    title Secant and tangent lines of a conic
    family k 4 5
    surface P2
    ...
    blowup a along A times {k} as Ea
    expect index A {12*k-17} cite secant-tangent-family
    expect discrepancy A {(12*k-21)/(12*k-17)} cite secant-tangent-family informational

``expect <quantity> <args...> <value> cite <anchor> [informational]``. Braces hold an
expression in ``k`` (integers, ``+ - * /`` and parentheses), replaced by its exact value
for each member of a family. Informational expectations are computed and reported but
never fail a case.
"""

import ast
import logging
import operator
import re
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from tigerhunt.corpus.quantities import QUANTITIES
from tigerhunt.exact import format_rational
from tigerhunt.exceptions import InputError, ParseError

logger = logging.getLogger(__name__)

_PLACEHOLDER = re.compile(r"\{([^{}]*)\}")
_ID = re.compile(r"^[a-z0-9][a-z0-9-]*$")
_HEADER = ("case", "title", "family")

_OPERATORS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def evaluate(expression: str, k: int) -> Fraction:
    """Exact value of a placeholder expression at ``k``."""
    try:
        tree = ast.parse(expression.strip(), mode="eval")
    except SyntaxError:
        raise ParseError("bad expression {!r}".format(expression)) from None
    return _evaluate(tree.body, Fraction(k), expression)


def _evaluate(node, k: Fraction, source: str) -> Fraction:
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return Fraction(node.value)
    if isinstance(node, ast.Name) and node.id == "k":
        return k
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _evaluate(node.operand, k, source)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and type(node.op) in _OPERATORS:
        left = _evaluate(node.left, k, source)
        right = _evaluate(node.right, k, source)
        if isinstance(node.op, ast.Div) and right == 0:
            raise ParseError("division by zero in {!r}".format(source))
        return _OPERATORS[type(node.op)](left, right)
    raise ParseError("unsupported expression {!r}".format(source))


def substitute(text: str, k: Optional[int]) -> str:
    def value(match):
        if k is None:
            raise ParseError("placeholder {{{}}} outside a family".format(match.group(1)))
        return format_rational(evaluate(match.group(1), k))

    return _PLACEHOLDER.sub(value, text)


@dataclass(frozen=True)
class Expectation:
    quantity: str
    args: Tuple[str, ...]
    value: str
    cite: str
    informational: bool = False
    line: int = 0

    def __str__(self):
        return " ".join((self.quantity,) + self.args)

    def to_dict(self):
        return {
            "quantity": self.quantity,
            "args": list(self.args),
            "expected": self.value,
            "cite": self.cite,
            "informational": self.informational,
        }


@dataclass(frozen=True)
class CorpusCase:
    """
    One worked example. A family case (``family`` set, ``k`` unset) is a template: its
    :meth:`members` are the concrete cases, with ids ``"<id>[k]"``.
    """

    id: str
    title: str = ""
    program: str = ""
    expectations: Tuple[Expectation, ...] = ()
    family: Optional[Tuple[int, int]] = None
    k: Optional[int] = None
    source: str = ""

    @property
    def is_family(self) -> bool:
        return self.family is not None and self.k is None

    def member(self, k: int) -> "CorpusCase":
        if self.family is None:
            raise InputError("{} is not a family".format(self.id))
        low, high = self.family
        if not low <= k <= high:
            raise InputError("k = {} outside {}..{} for {}".format(k, low, high, self.id))
        return parse_case(self.source, k=k)

    def members(self, k_range: Optional[Sequence[int]] = None) -> List["CorpusCase"]:
        if not self.is_family:
            return [self]
        low, high = self.family
        return [self.member(k) for k in (k_range if k_range is not None else range(low, high + 1))]


def _expectation(tokens: List[str], line: int) -> Expectation:
    if "cite" not in tokens:
        raise ParseError("expectation without a citation", line)
    at = tokens.index("cite")
    head, tail = tokens[1:at], tokens[at + 1:]
    if len(head) < 2:
        raise ParseError("expected 'expect <quantity> [args...] <value> cite <anchor>'", line)
    if not tail or len(tail) > 2 or (len(tail) == 2 and tail[1] != "informational"):
        raise ParseError("expected 'cite <anchor> [informational]'", line)
    quantity, args, value = head[0], tuple(head[1:-1]), head[-1]
    known = QUANTITIES.get(quantity)
    if known is None:
        raise ParseError("unknown quantity {!r}".format(quantity), line)
    if known.arity is None and not args:
        raise ParseError("{} needs arguments".format(quantity), line)
    if known.arity is not None and len(args) != known.arity:
        raise ParseError("{} takes {} argument(s)".format(quantity, known.arity), line)
    return Expectation(quantity, args, value, tail[0], len(tail) == 2, line)


def parse_case(text: str, k: Optional[int] = None) -> CorpusCase:
    """
    :raises: :class:`tigerhunt.exceptions.ParseError` on a malformed header or
        expectation. The program itself is only parsed when the case runs.
    """
    header = {}
    family = None
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens or tokens[0] not in _HEADER:
            continue
        keyword = tokens[0]
        if keyword in header:
            raise ParseError("{} given twice".format(keyword), number)
        header[keyword] = " ".join(tokens[1:])
        if keyword == "family":
            if len(tokens) != 4 or tokens[1] != "k":
                raise ParseError("expected 'family k <low> <high>'", number)
            try:
                family = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise ParseError("family bounds must be integers", number) from None
            if family[0] > family[1]:
                raise ParseError("empty family range", number)
    case_id = header.get("case", "")
    if not _ID.match(case_id):
        raise ParseError("a case needs an id of lowercase words, got {!r}".format(case_id))
    case = CorpusCase(case_id, header.get("title", ""), family=family, source=text)
    if family is not None and k is None:
        return case

    program: List[str] = []
    expectations: List[Expectation] = []
    for number, raw in enumerate(substitute(text, k).splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = body.split()
        if tokens and tokens[0] == "expect":
            expectations.append(_expectation(tokens, number))
            program.append("")
        elif tokens and tokens[0] in _HEADER:
            program.append("")
        else:
            program.append(raw)
    case_id = case_id if k is None else "{}[{}]".format(case_id, k)
    return replace(
        case,
        id=case_id,
        program="\n".join(program).rstrip("\n"),
        expectations=tuple(expectations),
        k=k,
    )


def load_cases(directory: Optional[Union[str, Path]] = None) -> List[CorpusCase]:
    """Cases from every ``*.txt`` file of ``directory``, the shipped corpus by default."""
    start = time.monotonic()
    if directory is None:
        root = resources.files("tigerhunt.corpus") / "cases"
    else:
        root = Path(directory)
    cases = []
    seen = set()
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".txt"):
            continue
        try:
            case = parse_case(entry.read_text(encoding="utf-8"))
        except ParseError as e:
            error = ParseError("{}: {}".format(entry.name, e))
            error.line = e.line
            raise error from None
        if case.id in seen:
            raise InputError("duplicate case id {}".format(case.id))
        seen.add(case.id)
        cases.append(case)
    logger.debug("LOAD %s %d case(s) (%.4f)s", root, len(cases), time.monotonic() - start)
    return cases
