"""Recompute every reference table and write the comparison to results/tables.csv."""
import sys
from pathlib import Path

from honest_noise.cli import main

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "results"
    out.mkdir(exist_ok=True)
    sys.exit(main(["reproduce-tables", "--table", "all", "--out", str(out / "tables.csv")] + sys.argv[1:]))
