"""Command-line entry point ``uncbench``.

Exit codes: 0 success, 1 certified violation (search) or failed check
(selftest), 2 input or schema error.
"""
import argparse
import json
import sys

from .errors import UncbenchError
from .runs import (
    ScenarioSpec,
    SearchSpec,
    SweepSpec,
    make_record,
    run_search,
    sweep_csv,
)

EXIT_OK, EXIT_FLAG, EXIT_INPUT = 0, 1, 2


class _InputFailure(Exception):
    pass


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _InputFailure(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise _InputFailure(f"{path}: invalid JSON ({exc})") from None


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump(doc):
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def cmd_report(args):
    spec = ScenarioSpec.from_dict(_load_json(args.spec))
    record = make_record(spec)
    _write(args.output, _dump(record.to_dict()))
    return EXIT_OK


def cmd_sweep(args):
    sweep = SweepSpec.from_dict(_load_json(args.spec))
    _write(args.output, sweep_csv(sweep))
    return EXIT_OK


def cmd_search(args):
    spec = SearchSpec.from_dict(_load_json(args.spec))
    seed = args.seed if args.seed is not None else spec.seed
    if seed is None:
        raise _InputFailure("a seed is required (--seed or the 'seed' field)")
    doc = run_search(spec, seed)
    _write(args.output, _dump(doc))
    return EXIT_FLAG if doc["violation"] else EXIT_OK


def cmd_selftest(args):
    from .config import tol_scale
    from .selftest import format_table, run_selftest

    tol_scale()  # reject a malformed UNCBENCH_TOL_SCALE before running anything
    results = run_selftest(args.seed)
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FLAG


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="uncbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="evaluate every inequality for one scenario")
    p.add_argument("spec")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="margins along one scenario parameter, as CSV")
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="violation or saturation search")
    p.add_argument("spec")
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=_seed)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("selftest", help="run invariant and acceptance checks")
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (_InputFailure, UncbenchError, ValueError) as exc:
        print(f"uncbench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
