"""pdmu: mu-calculus model checking over pushdown systems.

Exit codes: ``member`` exits 0 for true and 1 for false, ``diff`` exits 1
when the engine disagrees with the oracle; 2 means invalid input and 3 a
fixpoint that hit the iteration limit.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .ama import AmaError, from_json, to_dot, to_json
from .engine import IterationLimit, Options, model_check
from .mucalc import FormulaError, parse_formula
from .oracle import MODES, OracleError, diff_check
from .pds import PdsError, parse_config, parse_pds

DEFAULT_SEED = 20240101


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"{path}: {err.strerror}") from None


def _system(args):
    return parse_pds(_read(args.pds), source=args.pds)


def _formula(args):
    if (args.formula is None) == (args.formula_file is None):
        raise UsageError("give exactly one of --formula or --formula-file")
    text = args.formula if args.formula is not None else _read(args.formula_file)
    where = "--formula" if args.formula is not None else args.formula_file
    try:
        return parse_formula(text, closed=True)
    except FormulaError as err:
        raise FormulaError(f"{where}: {err}") from None


def _options(args) -> Options:
    return Options(max_iterations=args.max_iterations)


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_check(args) -> int:
    d = model_check(_system(args), _formula(args), _options(args))
    _write(args.output, to_json(d))
    if args.stats:
        print(d.stats.line(), file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return 0


def cmd_member(args) -> int:
    sys_ = _system(args)
    d = model_check(sys_, _formula(args), _options(args))
    c = parse_config(args.config)
    try:
        ok = d.accepts(c)
    except AmaError as err:
        raise PdsError(str(err)) from None
    print("true" if ok else "false")
    return 0 if ok else 1


def cmd_sample(args) -> int:
    d = model_check(_system(args), _formula(args), _options(args))
    for c in d.sample_accepted(args.max_depth):
        print(c)
    if args.stats:
        print(d.stats.line(), file=sys.stderr)
    return 0


def cmd_diff(args) -> int:
    report = diff_check(_system(args), _formula(args), args.mode, args.max_depth,
                        samples=args.samples, seed=args.seed, options=_options(args))
    _write(args.output, json.dumps(report, indent=1, sort_keys=True) + "\n")
    n = len(report["disagreements"])
    print(f"{report['cases']} cases, {n} disagreements", file=sys.stderr)
    return 1 if n else 0


def cmd_export_dot(args) -> int:
    _write(args.output, to_dot(from_json(_read(args.input))))
    return 0


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdmu", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output=False):
        p.add_argument("--pds", required=True, help="pushdown system file")
        p.add_argument("--formula", help="formula text")
        p.add_argument("--formula-file", help="file holding the formula")
        p.add_argument("--max-iterations", type=int, default=Options.max_iterations,
                       help="per-fixpoint safety limit (default %(default)s)")
        if output:
            p.add_argument("-o", "--output", help="output file (default stdout)")

    p = sub.add_parser("check", help="compute the denotation automaton as JSON")
    common(p, output=True)
    p.add_argument("--stats", action="store_true", help="print n, k, iterations and transition count")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("member", help="decide one configuration, e.g. --config 'p a b $'")
    common(p)
    p.add_argument("--config", required=True)
    p.set_defaults(run=cmd_member)

    p = sub.add_parser("sample", help="list accepted configurations up to a stack depth")
    common(p)
    p.add_argument("--max-depth", type=_nonneg, default=2)
    p.add_argument("--stats", action="store_true")
    p.set_defaults(run=cmd_sample)

    p = sub.add_parser("diff", help="compare the engine against a reference oracle")
    common(p, output=True)
    p.add_argument("--mode", choices=MODES, default="kripke")
    p.add_argument("--max-depth", type=_nonneg, default=3)
    p.add_argument("--samples", type=_nonneg, default=None,
                   help="check only this many configurations, drawn with --seed")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(run=cmd_diff)

    p = sub.add_parser("export-dot", help="render a denotation JSON as Graphviz")
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.run(args)
    except IterationLimit as err:
        print(f"pdmu: {err}", file=sys.stderr)
        return 3
    except (PdsError, FormulaError, AmaError, OracleError, UsageError) as err:
        print(f"pdmu: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
