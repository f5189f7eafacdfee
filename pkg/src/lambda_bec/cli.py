"""Command line entry point: ``lambda-bec <scenario> [--config FILE] [--set k=v] [--out DIR]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import SCENARIOS, parse_config
from .errors import ConfigError
from .scenarios import ScenarioError, run_scenario


def build_parser():
    p = argparse.ArgumentParser(prog="lambda-bec",
                                description="EIT response and probe photon statistics of a "
                                            "Λ-scheme condensate.")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--config", type=Path, help="flat 'key = value' file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one key (repeatable)")
    p.add_argument("--out", type=Path, help="output directory")
    return p


def load(args):
    text = args.config.read_text(encoding="utf-8") if args.config else ""
    # blank out the file's scenario line so reported line numbers still match the file
    lines = ["" if ln.strip().startswith("scenario") else ln for ln in text.splitlines()]
    lines += args.overrides
    # overrides replace same-named keys from the file
    keys = {}
    for i, ln in enumerate(lines):
        body = ln.split("#", 1)[0]
        if "=" in body:
            keys.setdefault(body.split("=", 1)[0].strip(), []).append(i)
    drop = {i for idx in keys.values() for i in idx[:-1]}
    doc = "\n".join("" if i in drop else ln for i, ln in enumerate(lines))
    return parse_config(doc, scenario=args.scenario)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        files = run_scenario(args.scenario, cfg, args.out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
