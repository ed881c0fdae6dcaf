"""Table of code lengths needed for a decoding-error bound, optimized vs equal priors.

Usage: python scripts/code_length.py [--m 4] [--target-error 1e-9] [--alpha-sq 0.5 1 2 ...]
"""
import argparse

from ffpsk.info import bhattacharyya_matrix, cutoff_rate_at, minimize_cutoff_objective, required_code_length, uniform_prior
from ffpsk.receiver import ReceiverConfig, exact_channel_matrix


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, choices=(3, 4), default=4)
    parser.add_argument("--target-error", type=float, default=1e-9)
    parser.add_argument("--alpha-sq", type=float, nargs="+", default=[0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
    args = parser.parse_args(argv)
    print(f"{'alpha_sq':>8} {'Rc_opt':>10} {'Rc_eq':>10} {'N_opt':>6} {'N_eq':>6} {'reduction':>9}")
    for a in args.alpha_sq:
        b = bhattacharyya_matrix(exact_channel_matrix(ReceiverConfig(M=args.m, alpha_sq=a)))
        rc_opt = minimize_cutoff_objective(b).value
        rc_eq = cutoff_rate_at(uniform_prior(args.m), b)
        n_opt = required_code_length(rc_opt, args.target_error)
        n_eq = required_code_length(rc_eq, args.target_error)
        print(f"{a:8.3g} {rc_opt:10.6f} {rc_eq:10.6f} {n_opt:6d} {n_eq:6d} {1 - n_opt / n_eq:9.3f}")


if __name__ == "__main__":
    main()
