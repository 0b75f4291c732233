"""Export the Bloch-plane and distinguishability curves for j = 0, 1, 2 to results/fig1/."""
import sys
from pathlib import Path

from honest_noise.cli import main

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "results" / "fig1"
    sys.exit(main(["fig1-data", "--j", "all", "--out", str(out)] + sys.argv[1:]))
