"""Command line entry point: ``semislant verify | list-examples | list-checks``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .checks import all_specs
from .contact import VARIANTS
from .examples import CODOMAIN_METRICS, EXAMPLES
from .report import FORMATS, SAMPLE_MODES, ConfigError, RunConfig, SampleConfig, emit_report, load_config, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semislant", description="Verify semi-slant submersion identities numerically.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the check suite on one submersion")
    v.add_argument("--config", help="JSON run configuration; other flags are ignored when given")
    v.add_argument("--example", choices=list(EXAMPLES))
    v.add_argument("--alpha", type=float)
    v.add_argument("--variant", choices=VARIANTS, default="corrected")
    v.add_argument("--codomain", choices=CODOMAIN_METRICS, default="quarter")
    v.add_argument("--points", type=int, default=100)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--sample", choices=SAMPLE_MODES, default="slice_y0")
    v.add_argument("--checks", default="all", help="'all' or comma separated check ids or group names")
    v.add_argument("--format", choices=FORMATS, default="json")
    v.add_argument("--out", help="write the report here instead of stdout")

    sub.add_parser("list-examples", help="show the registered submersions")
    sub.add_parser("list-checks", help="show check ids with their anchors")
    return p


def _config_from_args(a: argparse.Namespace) -> RunConfig:
    if a.config:
        return load_config(a.config)
    if a.example is None:
        raise ConfigError("example_id", "give --example or --config")
    checks = "all" if a.checks == "all" else tuple(c.strip() for c in a.checks.split(",") if c.strip())
    return RunConfig(example_id=a.example, alpha=a.alpha, variant=a.variant, codomain=a.codomain,
                     sample=SampleConfig(mode=a.sample, count=a.points, seed=a.seed), checks=checks)


def _verify(a: argparse.Namespace) -> int:
    try:
        config = _config_from_args(a)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    report = run_suite(config)
    data = emit_report(report, a.format)
    if a.out:
        with open(a.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return report.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if a.command == "verify":
        return _verify(a)
    if a.command == "list-examples":
        for info in EXAMPLES.values():
            alpha = " (needs --alpha)" if info.needs_alpha else ""
            print(f"{info.id}  n={info.n}  {info.description}{alpha}")
        return EXIT_OK
    for s in all_specs():
        print(f"{s.id}\t[{s.group}]\t{s.anchor}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
