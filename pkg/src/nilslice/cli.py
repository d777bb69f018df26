"""Command-line driver: nilslice <command> [flags]."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .campaign import COMMANDS, CampaignConfig, ConfigError, render_text, run_campaign


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilslice", description="Seeded verification campaigns for slices to sub-regular orbits.")
    p.add_argument("command", choices=COMMANDS + ("report-all",))
    p.add_argument("--kind", choices=("C", "D", "B"), action="append", help="repeatable; default all")
    p.add_argument("--m", type=int, action="append", help="repeatable; overrides --m-max")
    p.add_argument("--m-max", type=int, default=6)
    p.add_argument("--n", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(a: argparse.Namespace) -> CampaignConfig:
    m_values = tuple(sorted(set(a.m))) if a.m else tuple(range(2, a.m_max + 1))
    if not m_values:
        raise ConfigError("--m-max must be at least 2")
    kinds = tuple(dict.fromkeys(a.kind)) if a.kind else ("C", "D", "B")
    return CampaignConfig(kinds, m_values, a.n, a.samples, a.seed, a.tol, a.format)


def main(argv: Optional[Sequence[str]] = None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(a)
        report = run_campaign(a.command, cfg)
    except ConfigError as e:
        print(f"nilslice: {e}", file=sys.stderr)
        return 2
    text = render_text(report) if cfg.format == "text" else json.dumps(report, indent=2, sort_keys=True) + "\n"
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["summary"]["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
