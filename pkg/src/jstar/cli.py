"""Command-line entry point.

Exit codes: 0 when every certified check passes, 1 when one fails, 2 for an
invalid config or invocation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError
from .runner import RunReport, run

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parse_lambda(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected RE,IM")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jstar", description="J*-homomorphism stability experiments")
    parser.add_argument("--version", action="version", version=f"jstar {__version__}")
    parser.add_argument("--config", type=Path, help="scenario config (JSON)")
    parser.add_argument("--scenario", choices=["closure", "stability", "decompose", "example23"],
                        help="override the config's scenario")
    parser.add_argument("--seed", type=int, help="override sampling.seed")
    parser.add_argument("--json-indent", type=int, default=2)
    parser.add_argument("--suite", action="store_true", help="run the builtin acceptance suite")
    parser.add_argument("--only", type=int, action="append", metavar="N",
                        help="with --suite: run only criterion N (repeatable)")
    parser.add_argument("--timing", action="store_true", help="include wall time in reports")
    sub = parser.add_subparsers(dest="command")
    dec = sub.add_parser("decompose", help="write lambda as (M/3)(mu1 + mu2 + mu3)")
    dec.add_argument("--lambda", dest="lam", type=_parse_lambda, required=True, metavar="RE,IM")
    return parser


def _load_config(args) -> dict:
    if args.command == "decompose":
        cfg = {"scenario": "decompose", "lambda": args.lam}
    elif args.config is not None:
        try:
            cfg = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    elif args.scenario is not None:
        cfg = {}
    else:
        raise ConfigError("give --config, --scenario, --suite or the decompose command")
    if args.scenario is not None:
        cfg["scenario"] = args.scenario
    if args.seed is not None:
        cfg.setdefault("sampling", {})["seed"] = args.seed
    return cfg


def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    indent = args.json_indent if args.json_indent > 0 else None

    if args.suite:
        from .suite import SUITE_SEED, builtin_suite, suite_passed
        from .report import dumps

        reports = builtin_suite(args.only, seed=SUITE_SEED if args.seed is None else args.seed)
        ok = suite_passed(reports)
        _emit(dumps({"pass": ok, "reports": [r.to_dict(args.timing) for r in reports]}, indent))
        for r in reports:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.scenario} ({r.wall_time:.2f}s)", file=sys.stderr)
        return EXIT_PASS if ok else EXIT_FAIL

    try:
        rep: RunReport = run(_load_config(args))
    except ConfigError as exc:
        print(f"jstar: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(rep.to_json(indent, include_timing=args.timing))
    if args.timing:
        print(f"wall time {rep.wall_time:.3f}s", file=sys.stderr)
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
