"""Write the curve data for both symbol counts and both objectives as CSV.

Produces, for M in {3, 4}:
  mi_m{M}.csv      mutual information, error rate and MI-optimal priors
  cutoff_m{M}.csv  cutoff rates, code lengths and cutoff-optimal priors

Usage: python scripts/curve_data.py [--out DIR] [--steps N] [--alpha-sq-max A] [--threads T]
"""
import argparse
from pathlib import Path

from ffpsk.sweep import SweepConfig, rows_to_csv, run_sweep


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("curve_data"))
    parser.add_argument("--steps", type=int, default=101)
    parser.add_argument("--alpha-sq-max", type=float, default=5.0)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for m in (3, 4):
        for objective, stem in (("mi", "mi"), ("cutoff", "cutoff")):
            config = SweepConfig(m=m, alpha_sq_max=args.alpha_sq_max, steps=args.steps, objective=objective)
            path = args.out / f"{stem}_m{m}.csv"
            path.write_text(rows_to_csv(run_sweep(config, threads=args.threads)), encoding="utf-8", newline="\n")
            print(f"wrote {path}")


if __name__ == "__main__":
    main()
