"""
Command line front end::

    tigerhunt chain 2,5,2,2,2,2
    tigerhunt build -f banana.txt
    tigerhunt hunt -f banana.txt --max-steps 5
    tigerhunt verify-paper --json

Exit status is 0 on success, 1 when a computation fails, 2 for usage or input errors and 3
when a corpus case fails.
"""

import argparse
import asyncio
import functools
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from tigerhunt import __version__
from tigerhunt.corpus import CorpusRunner, load_cases
from tigerhunt.criteria import (
    bogomolov_check,
    boundary_e_top,
    tiger_certificate,
    toric_density_sample,
    toric_k2,
    uniruled_criterion,
)
from tigerhunt.exact import as_rational
from tigerhunt.exceptions import ComputationError, InputError
from tigerhunt.hunt import DEFAULT_MAX_STEPS, run_hunt
from tigerhunt.serializers import JsonSerializer, StringSerializer
from tigerhunt.singularity import (
    DEFAULT_MAX_INDEX,
    ChainSingularity,
    StarSingularity,
    bogomolov_tuples,
    discrepancies,
    enumerate_small_coefficient,
    enumerate_small_index,
    spectral_value,
)
from tigerhunt.surface import build, surface_report
from tigerhunt.tables import fibre_catalogue

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_USAGE = 2
EXIT_CORPUS = 3

_GREEN = "\x1b[32m"
_RED = "\x1b[31m"
_RESET = "\x1b[0m"


def _color(text: str, code: str, stream) -> str:
    if os.environ.get("NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return "{}{}{}".format(code, text, _RESET)


def _read_program(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError("cannot read {}: {}".format(path, e.strerror)) from None


def _weights(text: str) -> List[int]:
    try:
        return [int(w) for w in text.split(",") if w.strip()]
    except ValueError:
        raise InputError("expected comma separated integers, got {!r}".format(text)) from None


def cmd_chain(args):
    chain = ChainSingularity.parse(args.chain)
    if not any(chain.marked):
        chain = ChainSingularity(chain.weights, (True, False))
    data = discrepancies(chain.unmarked())
    return {
        "chain": str(chain.unmarked()),
        "index": data.index,
        "discrepancies": list(data.e),
        "coefficient": data.coefficient,
        "spectral_value": spectral_value(chain),
    }


def cmd_star(args):
    star = StarSingularity.parse(args.star)
    data = discrepancies(star)
    return {
        "star": str(star),
        "det_abs": data.det_abs,
        "discrepancies": list(data.e),
        "coefficient": data.coefficient,
    }


def cmd_build(args):
    built = build(_read_program(args.file))
    return surface_report(built.model())


def cmd_hunt(args):
    built = build(_read_program(args.file))
    result = run_hunt(built.model(), max_steps=args.max_steps, boundary=built.boundary)
    return result.to_dict()


def cmd_check(args):
    if args.criterion == "bogomolov":
        indices = _weights(args.values[0]) if args.values else []
        e_top_b = boundary_e_top(args.boundary_components)
        return {
            "indices": indices,
            "boundary_e_top": e_top_b,
            "holds": bogomolov_check(indices, e_top_b=e_top_b),
        }
    if args.criterion == "uniruled":
        if len(args.values) != 3:
            raise InputError("uniruled takes -K·Z and the two branch indices")
        kz, x, y = args.values
        try:
            x, y = int(x), int(y)
        except ValueError:
            raise InputError("branch indices must be integers") from None
        return {
            "minus_k": as_rational(kz),
            "indices": [x, y],
            "holds": uniruled_criterion(kz, x, y),
        }
    if not args.file:
        raise InputError("tiger needs -f <program>")
    reason = tiger_certificate(build(_read_program(args.file)).model())
    return {"tiger": reason is not None, "reason": reason}


def cmd_enumerate(args):
    if args.what == "small-coefficient":
        bound = as_rational(args.value or "3/5")
        families = enumerate_small_coefficient(bound, max_index=args.max_index)
        return {"bound": bound, "families": [str(f) for f in families]}
    if args.what == "small-index":
        n = int(args.value or 7)
        return {"n": n, "chains": [str(c) for c in enumerate_small_index(n)]}
    if args.what == "bogomolov-tuples":
        return {"tuples": [str(t) for t in bogomolov_tuples()]}
    return {"fibres": [entry.to_dict() for entry in fibre_catalogue()]}


def cmd_toric(args):
    if args.sample is not None:
        families = toric_density_sample(args.p, args.sample)
        return {
            "r": args.p,
            "families": [
                {"indices": list(f.indices), "k_squared": f.k_squared} for f in families
            ],
        }
    if args.q is None or args.r is None:
        raise InputError("toric takes three indices p q r")
    return {"indices": [args.p, args.q, args.r], "k_squared": toric_k2(args.p, args.q, args.r)}


def cmd_verify_paper(args):
    cases = load_cases(args.corpus)
    if args.case:
        wanted = set(args.case)
        cases = [c for c in cases if c.id in wanted]
        missing = wanted - {c.id for c in cases}
        if missing:
            raise InputError("unknown case(s) {}".format(", ".join(sorted(missing))))
    runner = CorpusRunner(concurrency=args.concurrency)
    return asyncio.run(runner.run_all(cases))


COMMANDS = {
    "chain": cmd_chain,
    "star": cmd_star,
    "build": cmd_build,
    "hunt": cmd_hunt,
    "check": cmd_check,
    "enumerate": cmd_enumerate,
    "toric": cmd_toric,
    "verify-paper": cmd_verify_paper,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tigerhunt", description="Exact computations on log terminal surfaces."
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    add = functools.partial(sub.add_parser, parents=[common])

    p = add("chain", help="discrepancies of a cyclic quotient chain")
    p.add_argument("chain", help="weights, e.g. 2,5,2,2,2,2 or 2,2,3,3,A5@L")

    p = add("star", help="discrepancies of a star")
    p.add_argument("star", help="e.g. 'star(2; 2 | 2 | 2,2)'")

    for name, text in (("build", "surface report"), ("hunt", "hunt log")):
        p = add(name, help="{} of a blow-up program".format(text))
        p.add_argument("-f", "--file", required=True, help="program file, - for stdin")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)

    p = add("check", help="numerical criteria")
    p.add_argument("criterion", choices=("bogomolov", "uniruled", "tiger"))
    p.add_argument("values", nargs="*")
    p.add_argument("--boundary-components", type=int, default=0)
    p.add_argument("-f", "--file")

    p = add("enumerate", help="classification lists")
    p.add_argument(
        "what", choices=("small-coefficient", "small-index", "bogomolov-tuples", "fibres")
    )
    p.add_argument("value", nargs="?")
    p.add_argument("--max-index", type=int, default=DEFAULT_MAX_INDEX)

    p = add("toric", help="K² of a rank one toric surface")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int, nargs="?")
    p.add_argument("r", type=int, nargs="?")
    p.add_argument("--sample", type=int, metavar="CAP_Q", help="density sample of index p")

    p = add("verify-paper", help="run the worked example corpus")
    p.add_argument("--case", action="append", help="only this case id, repeatable")
    p.add_argument("--corpus", help="directory of case files")
    p.add_argument("--concurrency", type=int, default=4)
    return parser


def _render_corpus(report, stream) -> str:
    lines = []
    for entry in report.entries:
        status = _color("ok", _GREEN, stream) if entry.passed else _color("FAIL", _RED, stream)
        lines.append("{} {}".format(status, entry.case.id))
        if entry.error:
            lines.append("  error: {}".format(entry.error))
        for outcome in entry.outcomes:
            if outcome.ok:
                continue
            mark = "info" if not outcome.counts else "fail"
            found = outcome.error if outcome.error else outcome.computed
            expected = outcome.expected or outcome.expectation.value
            lines.append(
                "  {} {}: expected {} got {} [{}]".format(
                    mark, outcome.expectation, expected, found, outcome.expectation.cite
                )
            )
    lines.append("{} case(s), {} failed".format(len(report.entries), len(report.failures)))
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    try:
        result = COMMANDS[args.command](args)
    except (InputError, ValueError) as e:
        print("tigerhunt: error: {}".format(e), file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as e:
        print("tigerhunt: {}: {}".format(type(e).__name__, e), file=sys.stderr)
        return EXIT_COMPUTATION

    if args.json:
        print(JsonSerializer().dumps(result))
    elif args.command == "verify-paper":
        print(_render_corpus(result, sys.stdout))
    else:
        print(StringSerializer().dumps(result))

    if args.command == "verify-paper" and not result.passed:
        return EXIT_CORPUS
    return EXIT_OK
