"""``bisim`` command: decide timed bisimilarity of two automaton files."""

import argparse
import logging
import os
import sys

from .checker import TRACE, CheckerError, check_bisimilar
from .model import ValidationError
from .parser import ParseError, parse_file

EXIT_BISIMILAR = 0
EXIT_NOT_BISIMILAR = 1
EXIT_ERROR = 2

_LOG_LEVELS = {"off": logging.CRITICAL + 1, "info": logging.INFO, "trace": TRACE}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def build_parser():
    p = _Parser(prog="bisim", description="Decide timed bisimilarity of two timed automata.")
    p.add_argument("file_a", help="first automaton (TChecker-style text)")
    p.add_argument("file_b", help="second automaton")
    p.add_argument("--order", type=int, metavar="N", help="only compare behaviour up to N steps")
    p.add_argument("--stats", action="store_true", help="report visited pairs and wall time")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument(
        "--max-visited", type=int, default=10**7, metavar="N", help="abort after visiting N state pairs"
    )
    return p


def _setup_logging():
    level = os.environ.get("BISIM_LOG", "off").strip().lower()
    logging.basicConfig(
        level=_LOG_LEVELS.get(level, _LOG_LEVELS["off"]),
        stream=sys.stderr,
        format="%(levelname)s %(message)s",
    )


def _load(path):
    try:
        return parse_file(path)
    except ParseError as exc:
        raise _Failure("%s:%s: %s" % (path, exc.span, exc.message))
    except OSError as exc:
        raise _Failure("%s: %s" % (path, exc.strerror or exc))


class _Failure(Exception):
    pass


def run(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging()
    if args.order is not None and args.order < 0:
        print("bisim: --order must be non-negative", file=sys.stderr)
        return EXIT_ERROR
    try:
        a = _load(args.file_a)
        b = _load(args.file_b)
        verdict = check_bisimilar(a, b, order=args.order, max_visited=args.max_visited)
    except _Failure as exc:
        print("bisim: %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    except ValidationError as exc:
        print("bisim: invalid automaton: %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    except CheckerError as exc:
        print("bisim: %s" % exc, file=sys.stderr)
        return EXIT_ERROR

    if args.json:
        print(verdict.to_json(with_time=args.stats))
    else:
        print("bisimilar" if verdict.bisimilar else "not bisimilar")
        for text in verdict.rendered:
            print("  " + text)
        if args.stats:
            print("pairs visited: %d" % verdict.pairs_visited)
            print("time: %.3f ms" % verdict.millis)
    return EXIT_BISIMILAR if verdict.bisimilar else EXIT_NOT_BISIMILAR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
