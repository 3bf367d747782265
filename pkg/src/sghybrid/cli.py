"""Command-line entry point.

Subcommands
-----------
check-class      membership, parameter conditions and (with fixed points) quasi-nonexpansiveness
fit-cone         LP search for a quadruple the mapping satisfies, or an infeasibility certificate
iterate          run picard/mann/ishikawa and write ``trace.csv`` plus ``summary.json``
verify-theorems  run the property suites and print a pass/fail matrix

Exit codes: 0 all checks pass, 1 configuration or IO error, 2 a mathematical
check failed.

Config schema (JSON)
--------------------
::

    {
      "seed": 7,                                   # required unless --seed is given
      "space": {"n": 2, "p": 2.0},
      "mapping": {
        "kind": "identity | constant | scaling | negation | affine | metric-projection | table",
        "domain": {"kind": "whole-space | box | ball | finite-point-set", ...},
        "value": [..], "factor": 0.5, "A": [[..]], "b": [..],
        "target": {<domain>}, "images": [[..]],
        "fixed_points": [[..], ..]
      },
      "params": "nonexpansive" | {"alpha": 1, "beta": 0, "gamma": -1, "delta": 0},
      "samples": {"pairs": 1000, "points": 1000},
      "tol": 1e-9,
      "extra_pairs": [[[1.0], [0.0]]],
      "impose_conditions": true,                   # fit-cone
      "verbose": true,                             # check-class: also write membership.csv
      "scheme": "ishikawa",                        # iterate
      "schedules": {"lambda": 0.5, "gamma": {"family": "harmonic", "a": 0.5, "b": 0.5}},
      "x0": [1.0, 2.0],
      "stop": {"residual_tol": 1e-10, "max_iter": 10000}
    }

Domains: ``box`` takes ``lo``/``hi`` (scalars or vectors), ``ball`` takes
``radius`` and optional ``center``, ``finite-point-set`` takes ``points``.
Schedules are a bare number (constant) or ``{"family": "constant", "c"}``,
``{"family": "harmonic", "a", "b"}`` for a + b/(n+1), ``{"family": "table",
"values"}`` (last value repeats); an optional ``"declared"`` object of flags
must match the analytic ones.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .errors import ConfigError, DimensionError, DomainError, PreconditionError

COMMANDS = {
    "check-class": ex.cmd_check_class,
    "fit-cone": ex.cmd_fit_cone,
    "iterate": ex.cmd_iterate,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; here 2 is reserved for failed checks
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ex.EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sghybrid", description="Symmetric generalized hybrid mapping toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path)
        p.add_argument("--seed", type=int)
    p = sub.add_parser("verify-theorems")
    p.add_argument("--suite", default="all", choices=["all", *ex.SUITES])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return ex.EXIT_CONFIG
    try:
        if args.command == "verify-theorems":
            report = ex.verify_theorems(args.suite, args.seed)
            sys.stdout.write(ex.format_matrix(report))
            if args.out is not None:
                args.out.mkdir(parents=True, exist_ok=True)
                (args.out / "report.json").write_text(ex.dumps(report))
            return ex.EXIT_OK if report["all_passed"] else ex.EXIT_FAIL
        cfg = ex.load_config(args.config)
        report, code = COMMANDS[args.command](cfg, seed=args.seed, out=args.out)
        sys.stdout.write(ex.dumps(report))
        return code
    except (ConfigError, DimensionError, DomainError, PreconditionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ex.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
