"""Run every scenario with its default preset and write the CSVs to one directory.

Usage: python3 scripts/reproduce_figures.py [OUT_DIR] [--only fig5 table1 ...]
"""
import argparse
import time
from pathlib import Path

from lambda_bec.config import SCENARIOS, parse_config
from lambda_bec.scenarios import run_scenario


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("out", nargs="?", type=Path, default=Path("results"))
    p.add_argument("--only", nargs="+", choices=SCENARIOS, default=list(SCENARIOS))
    args = p.parse_args()
    for name in args.only:
        t0 = time.perf_counter()
        files = run_scenario(name, parse_config("", scenario=name), args.out)
        print(f"{name:15s} {time.perf_counter() - t0:6.2f} s  "
              + " ".join(f.name for f in files))


if __name__ == "__main__":
    main()
