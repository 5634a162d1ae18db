"""Analyse every file in systems/ and print the text reports."""

import argparse
from pathlib import Path

from jetvessiot.cli import parse, analyze, AnalysisConfig

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--no-contract", action="store_true")
    ap.add_argument("files", nargs="*", help="defaults to systems/*.sys")
    args = ap.parse_args()
    files = [Path(f) for f in args.files] or sorted((ROOT / "systems").glob("*.sys"))
    for f in files:
        rep = analyze(parse(f.read_text()), AnalysisConfig(contract=not args.no_contract))
        print("=" * 20, f.name)
        print(rep.to_text())


if __name__ == "__main__":
    main()
