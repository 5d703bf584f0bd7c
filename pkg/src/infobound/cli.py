"""``infobound`` command line.

Exit codes: 0 success, 1 failed verification / I/O / config error,
2 a computed row violated its own inequality, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import figures, sweep, verify
from .core import ConfigurationError
from .figures import ConsistencyError, write_csv

EXIT_FAIL = 1
EXIT_INCONSISTENT = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_override(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infobound", description="MI, Fisher information and MMSE toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fig = sub.add_parser("fig", help="write the data for one figure as CSV")
    fig.add_argument("n", type=int, choices=sorted(figures.FIGURES))
    fig.add_argument("--out", type=Path, help="output path (default: stdout)")
    fig.add_argument("--override", action="append", type=_parse_override, default=[], metavar="KEY=VALUE",
                     help="replace a default, e.g. count=30 or b=0,25 (repeatable)")
    fig.add_argument("--alpha", help="comma-separated alpha values (figure 3 only)")

    ver = sub.add_parser("verify", help="run a property suite")
    ver.add_argument("suite", choices=["all", *verify.SUITES])
    ver.add_argument("--report", type=Path, help="write a JSON record per check")
    ver.add_argument("--seed", type=int, default=42)

    sw = sub.add_parser("sweep", help="run a parameter sweep from an INI config")
    sw.add_argument("--config", type=Path, required=True)
    sw.add_argument("--out", type=Path, required=True)
    return parser


def _emit(table: figures.Table, out: Optional[Path]) -> None:
    if out is None:
        write_csv(sys.stdout, table.header, table.rows, table.meta)
        return
    with open(out, "w", newline="\n", encoding="utf-8") as fh:
        write_csv(fh, table.header, table.rows, table.meta)


def cmd_fig(args, parser) -> int:
    overrides = dict(args.override)
    if args.alpha is not None:
        if args.n != 3:
            parser.error("--alpha applies to figure 3 only")
        overrides["alpha"] = args.alpha
    try:
        spec = figures.apply_overrides(figures.FIGURES[args.n](), overrides)
    except ConfigurationError as exc:
        parser.error(str(exc))
    try:
        table = figures.BUILDERS[args.n](spec)
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ConfigurationError as exc:
        parser.error(str(exc))
    try:
        _emit(table, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return 0


def cmd_verify(args) -> int:
    checks = verify.run(args.suite, seed=args.seed)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name}  lhs={c.lhs:.6g} rhs={c.rhs:.6g} violation={c.violation:.3g}")
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    if args.report is not None:
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                json.dump([c.record() for c in checks], fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            print(f"cannot write {args.report}: {exc}", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_FAIL if n_fail else 0


def cmd_sweep(args) -> int:
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        cfg = sweep.parse_config(text)
        table = sweep.run_sweep(cfg)
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ConfigurationError as exc:
        print(f"invalid sweep config: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        _emit(table, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fig":
        return cmd_fig(args, parser)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_sweep(args)


if __name__ == "__main__":
    sys.exit(main())
