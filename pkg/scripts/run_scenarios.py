"""Run every scenario in scenarios/ through the CLI command it is meant for."""

import argparse
import sys
from pathlib import Path

from bochnerlab.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]

PLAN = [
    ("integrate-sf", "indicator.json"),
    ("integrate-sf", "bad_mass.json"),
    ("approx", "linear_pair.json"),
    ("bint", "linear_pair.json"),
    ("compare-lebesgue", "identity.json"),
    ("compare-lebesgue", "table.json"),
    ("dominated", "dominated.json"),
    ("sep-check", "sep_check.json"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    for command, name in PLAN:
        out = Path(args.out) / Path(name).stem
        print(f"== {command} {name}", flush=True)
        code = cli_main([command, "--scenario", str(ROOT / "scenarios" / name), "--out", str(out)])
        print(f"-> exit {code}", flush=True)


if __name__ == "__main__":
    sys.exit(main())
